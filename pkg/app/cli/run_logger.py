# app/cli/run_logger.py
#
# Run Logger - run, sweep and oracle events of the command line.
#
# Messages carry [RUN], [SWEEP] or [ORACLE] prefixes.
#

import logging

logger = logging.getLogger("app.cli")


class RunLogger:

    @staticmethod
    def run_started(data_seed: int, model_seed: int, output_dir):
        logger.info("[RUN] Started: data_seed=%d, model_seed=%d -> %s", data_seed, model_seed, output_dir)

    @staticmethod
    def run_finished(data_seed: int, accuracy: float, cumulative_nll: float, macs_total: int):
        logger.info(
            "[RUN] Finished data_seed=%d: avg accuracy=%.4f, cumulative NLL=%.2f, MACs=%d",
            data_seed,
            accuracy,
            cumulative_nll,
            macs_total,
        )

    @staticmethod
    def file_written(path):
        logger.debug("[RUN] Wrote %s", path)

    @staticmethod
    def gradient_stop(position: int):
        logger.info("[RUN] Gradient stop at position %d", position)

    @staticmethod
    def sweep_started(num_points: int, workers: int):
        logger.info("[SWEEP] %d grid points on %d worker(s)", num_points, workers)

    @staticmethod
    def point_started(index: int, settings: dict):
        logger.info("[SWEEP] Point %d: %s", index, settings)

    @staticmethod
    def point_failed(index: int, error: str):
        logger.warning("[SWEEP] Point %d failed: %s", index, error)

    @staticmethod
    def pareto_front(front_size: int, total: int):
        logger.info("[SWEEP] Pareto front: %d of %d points", front_size, total)

    @staticmethod
    def oracle_result(window: int, accuracy: float):
        logger.info("[ORACLE] W=%d: accuracy=%.4f", window, accuracy)
