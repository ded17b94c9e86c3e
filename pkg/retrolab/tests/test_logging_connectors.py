from unittest import mock

import numpy as np
import pytest
from experiment_logging.base_logging_connector import MemoryLoggingConnector, NoopLoggingConnector
from experiment_logging.wandb_connector import WandBConnector


def test_memory_connector():
    connector = MemoryLoggingConnector()
    connector.start({"seed": 1})
    connector.log({"e_hat": 0.5})
    connector.log({"e_hat": 0.6, "n": 10})
    connector.log_array("spectrum", np.ones((3, 5)))
    connector.finish()
    assert connector.started and connector.finished
    assert connector.config == {"seed": 1}
    assert connector.last("e_hat") == 0.6
    assert connector.arrays["spectrum"].shape == (3, 5)
    with pytest.raises(KeyError):
        connector.last("missing")
    with pytest.raises(AssertionError):
        connector.log_array("flat", np.ones(3))


def test_noop_connector():
    connector = NoopLoggingConnector()
    connector.start()
    connector.log({"x": 1})
    connector.log_array("x", np.ones((1, 1)))
    connector.finish()


def test_wandb_connector():
    connector = WandBConnector(run_name="test")
    # nothing is sent before start()
    with pytest.raises(AssertionError):
        connector.log({"x": 1})

    with mock.patch("experiment_logging.wandb_connector.wandb") as wandb:
        connector.start({"seed": 3})
        wandb.init.assert_called_once_with(project="retrolab", name="test", save_code=True, config={"seed": 3})
        connector.log_array("spectrum", np.zeros((2, 2)), columns=["a", "b"])
        wandb.Table.assert_called_once_with(columns=["a", "b"], data=[[0.0, 0.0], [0.0, 0.0]])
        connector.finish()
        wandb.init.return_value.finish.assert_called_once()
    assert connector.run is None
