import json
import logging

from experiment.experiment_sim import discriminate, discrimination_configs

if __name__ == '__main__':
    logging.basicConfig(level=logging.INFO)
    qm_config, causal_config = discrimination_configs(n_events=1_000_000, seed=0, max_workers=4)
    report = discriminate(qm_config, causal_config)

    print(json.dumps(report.to_dict(), indent=2))
