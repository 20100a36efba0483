"""Shared helper: small hand-buildable interim datasets for posterior tests."""

import numpy as np

from dtedesign.bpp import InterimDataset


def small_interim_dataset(seed: int) -> InterimDataset:
    g = np.random.default_rng(seed)
    n = 12
    observed = g.exponential(12.0, size=n)
    event = g.random(n) < 0.7
    is_exp = np.arange(n) % 2 == 0
    return InterimDataset(
        fraction=0.5,
        events_observed=int(event.sum()),
        calendar_time=float(observed.max()),
        observed_time=observed,
        event_flag=event,
        is_experimental=is_exp,
        all_is_experimental=is_exp.copy(),
        all_recruit_time=np.zeros(n),
        included=np.ones(n, dtype=bool),
    )
