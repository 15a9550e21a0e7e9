#!/usr/bin/env python3
"""
Throughput benchmark for batched propagator runs.

Usage:
    python scripts/benchmark_propagator.py --family polynomial --xis 64 --t-max 1000 --threads 4
"""
import argparse
import sys
import time
from dataclasses import replace
from pathlib import Path

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

import numpy as np  # noqa: E402

from gecl.config import AppConfig, CoefficientConfig, Family  # noqa: E402
from gecl.logging_config import get_logger, setup_logging  # noqa: E402
from gecl.services.coefficient_service import CoefficientService  # noqa: E402
from gecl.services.propagator_service import PropagatorService  # noqa: E402
from gecl.utils.grids import geometric_time_grid, log_frequency_grid  # noqa: E402

setup_logging()
logger = get_logger('benchmark')


def benchmark_propagator(config: AppConfig, xi_count: int, t_max: float) -> dict:
    """Integrate E(t, 0, ξ) on a geometric grid for ``xi_count`` frequencies."""
    coef = CoefficientService(config).build()
    service = PropagatorService(config)
    T = coef.shape.safe_horizon(t_max)
    xis = log_frequency_grid(config.propagator.xi_min, config.propagator.xi_max, xi_count)
    times = geometric_time_grid(T, config.propagator.points_per_decade)[1:]

    logger.info("=" * 80)
    logger.info(f"BENCHMARK: {coef.describe()}, {xi_count} frequencies up to t={T:g}, "
                f"{config.threads} thread(s)")
    logger.info("=" * 80)

    # Warm-up (jet and primitive tables)
    service.integrate_many(coef, xis[:1], 0.0, times[:1])

    start_time = time.time()
    samples = service.integrate_many(coef, xis, 0.0, times)
    duration = time.time() - start_time

    errors = service.liouville_errors(coef.shape, 0.0, times, samples.entries, samples.log_scale)
    logger.info(f"Total time: {duration:.2f}s")
    logger.info(f"Throughput: {xi_count / duration:.1f} frequencies/second")
    logger.info(f"Worst Liouville error: {float(np.max(errors)):.2e}")

    return {
        'duration': duration,
        'frequencies': xi_count,
        'samples': int(times.size * xi_count),
        'throughput': xi_count / duration,
        'max_det_err': float(np.max(errors)),
    }


def main():
    parser = argparse.ArgumentParser(description='Benchmark batched propagator runs')
    parser.add_argument('--family', default='polynomial', choices=[f.value for f in Family],
                        help='Shape-function family')
    parser.add_argument('--xis', type=int, default=32, help='Number of frequencies')
    parser.add_argument('--t-max', type=float, default=1000.0, help='Integration horizon')
    parser.add_argument('--threads', type=int, default=1, help='Worker threads')
    parser.add_argument('--tol', type=float, default=1e-9, help='Integrator tolerance')

    args = parser.parse_args()

    config = AppConfig(coefficient=CoefficientConfig(family=Family(args.family)), threads=args.threads)
    config = replace(config, propagator=replace(config.propagator, tol=args.tol))
    result = benchmark_propagator(config, args.xis, args.t_max)

    print("\n" + "=" * 80)
    print("BENCHMARK SUMMARY")
    print("=" * 80)
    print(f"Family: {args.family}")
    print(f"Frequencies: {result['frequencies']}  Samples: {result['samples']}")
    print(f"Duration: {result['duration']:.2f}s")
    print(f"Throughput: {result['throughput']:.1f} frequencies/sec")
    print(f"Max det error: {result['max_det_err']:.2e}")


if __name__ == '__main__':
    main()
