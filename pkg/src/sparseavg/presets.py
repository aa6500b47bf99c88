"""In-repo experiment presets; these drive the acceptance suite.

Every run preset finishes in well under its documented budget on commodity
hardware.  peak_scan samples the local oscillation maximum inside half a
period around each nominal radius, so fitted slopes track the decay
envelope of the oscillating kernels rather than their zero crossings.
"""

import math

SQ2, SQ3, SQ5, SQ7 = math.sqrt(2.0), math.sqrt(3.0), math.sqrt(5.0), math.sqrt(7.0)

# |frequency| of the heisenberg-abelian-decay character below
_HEIS_FREQ = math.hypot(SQ2, SQ5)

RUN_PRESETS = {
    "torus-circle-decay": {
        "experiment_id": "torus-circle-decay",
        "seed": 20260810,
        "space": {"kind": "torus", "n": 2},
        "base_point": {"kind": "haar", "seed": 7},
        "observable": {"kind": "character", "frequency": [1, 0]},
        "average": {"family": "sphere", "resolution": 64, "resolution_per_R": 16.0},
        "r_grid": {"kind": "geometric", "min": 2.0, "max": 500.0, "count": 16},
        "peak_scan": {"period": 1.0, "points": 17},
        "prediction": {},
        "timing": False,
    },
    "torus-ball-decay": {
        "experiment_id": "torus-ball-decay",
        "seed": 20260810,
        "space": {"kind": "torus", "n": 2},
        "base_point": {"kind": "haar", "seed": 7},
        "observable": {"kind": "character", "frequency": [1, 0]},
        "average": {"family": "ball", "resolution": 64, "resolution_per_R": 16.0},
        "r_grid": {"kind": "geometric", "min": 2.0, "max": 60.0, "count": 12},
        "peak_scan": {"period": 1.0, "points": 9},
        "prediction": {},
        "timing": False,
    },
    "br-alpha-sweep": {
        "experiment_id": "br-alpha-sweep",
        "seed": 20260810,
        "space": {"kind": "torus", "n": 2},
        "base_point": {"kind": "haar", "seed": 7},
        "observable": {"kind": "character", "frequency": [1, 0]},
        "average": {
            "family": "bochner_riesz",
            "alpha": 0.0,
            "resolution": 64,
            "resolution_per_R": 16.0,
        },
        "sweep": {"path": "average.alpha", "values": [-0.5, 0.0, 0.5]},
        "r_grid": {"kind": "geometric", "min": 2.0, "max": 60.0, "count": 12},
        "peak_scan": {"period": 1.0, "points": 9},
        "prediction": {"gamma_prime": 1.0},
        "timing": False,
    },
    "annulus-decay": {
        "experiment_id": "annulus-decay",
        "seed": 20260810,
        "space": {"kind": "torus", "n": 2},
        "base_point": {"kind": "haar", "seed": 7},
        "observable": {"kind": "character", "frequency": [1, 0]},
        "average": {
            "family": "annulus",
            "omega": 0.8,
            "resolution": 64,
            "resolution_per_R": 16.0,
        },
        "r_grid": {"kind": "geometric", "min": 2.0, "max": 40.0, "count": 12},
        "prediction": {"gamma_prime": 0.5},
        "timing": False,
    },
    "heisenberg-abelian-decay": {
        "experiment_id": "heisenberg-abelian-decay",
        "seed": 20260810,
        "space": {
            "kind": "heisenberg",
            "flows": [[SQ2, SQ3, 0.0], [SQ5, SQ7, 0.0]],
        },
        "base_point": {"kind": "haar", "seed": 7},
        "observable": {"kind": "nilcharacter", "type": "abelian", "frequency": [1, 0, 1, 0]},
        "average": {"family": "sphere", "resolution": 64, "resolution_per_R": 45.0},
        "r_grid": {"kind": "geometric", "min": 2.0, "max": 200.0, "count": 12},
        "peak_scan": {"period": 1.0 / _HEIS_FREQ, "points": 9},
        "prediction": {},
        "timing": False,
    },
    "modular-bump-decay": {
        "experiment_id": "modular-bump-decay",
        "seed": 20260810,
        "space": {"kind": "modular", "factors": 2},
        "base_point": {"kind": "haar", "seed": 20260810},
        "observable": {
            "kind": "bump",
            "center": 1.0,
            "width": 0.3,
            "factor": 0,
            "centered": True,
            "mc_samples": 400000,
            "mc_seed": 11,
        },
        "average": {"family": "ball", "quadrature": "lowdisc", "resolution": 16384},
        "r_grid": {"kind": "geometric", "min": 10.0, "max": 1000.0, "count": 12},
        "prediction": {},
        "timing": False,
    },
}

NILSEARCH_PRESETS = {
    "heisenberg-dependent-obstruction": {
        "experiment_id": "heisenberg-dependent-obstruction",
        "seed": 20260810,
        "space": {"kind": "heisenberg", "flows": [[1.0, 1.0, 0.0], [SQ5, SQ7, 0.0]]},
        "base_point": {"kind": "haar", "seed": 7},
        "delta": 0.2,
        "C1": 1.0,
        "C2": 1.0,
        "R": 200.0,
    },
    "heisenberg-independent-obstruction": {
        "experiment_id": "heisenberg-independent-obstruction",
        "seed": 20260810,
        "space": {"kind": "heisenberg", "flows": [[SQ2, SQ3, 0.0], [SQ5, SQ7, 0.0]]},
        "base_point": {"kind": "haar", "seed": 7},
        "delta": 0.2,
        "C1": 1.0,
        "C2": 1.0,
        "R": 200.0,
    },
}


def get_preset(name: str) -> dict:
    import copy

    if name in RUN_PRESETS:
        return copy.deepcopy(RUN_PRESETS[name])
    if name in NILSEARCH_PRESETS:
        return copy.deepcopy(NILSEARCH_PRESETS[name])
    raise KeyError(name)
