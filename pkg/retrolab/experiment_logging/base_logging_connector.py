from abc import abstractmethod

import numpy as np


class BaseLoggingConnector:
    """Sink for experiment metrics: scalar dicts and 2D arrays such as delay spectra."""
    @abstractmethod
    def start(self, config: dict | None = None):
        raise NotImplementedError

    @abstractmethod
    def log(self, log_dict: dict):
        raise NotImplementedError

    @abstractmethod
    def log_array(self, array_name: str, array: np.ndarray, columns: list[str] | None = None):
        raise NotImplementedError

    @abstractmethod
    def finish(self):
        raise NotImplementedError


class NoopLoggingConnector(BaseLoggingConnector):
    """Dummy logging connector that does nothing."""
    def start(self, config: dict | None = None):
        pass

    def log(self, log_dict: dict):
        pass

    def log_array(self, array_name: str, array: np.ndarray, columns: list[str] | None = None):
        pass

    def finish(self):
        pass


class MemoryLoggingConnector(BaseLoggingConnector):
    """Keeps everything in memory. Mostly used for testing purposes."""
    def __init__(self):
        self.config: dict | None = None
        self.records: list[dict] = []
        self.arrays: dict[str, np.ndarray] = {}
        self.started = False
        self.finished = False

    def start(self, config: dict | None = None):
        self.config = config
        self.started = True

    def log(self, log_dict: dict):
        self.records.append(dict(log_dict))

    def log_array(self, array_name: str, array: np.ndarray, columns: list[str] | None = None):
        assert array.ndim == 2, "Array must be 2D"
        self.arrays[array_name] = np.array(array, copy=True)

    def finish(self):
        self.finished = True

    def last(self, key: str):
        """Most recent value logged under key."""
        for record in reversed(self.records):
            if key in record:
                return record[key]
        raise KeyError(key)
