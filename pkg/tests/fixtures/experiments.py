"""Small experiment configs shared by the CLI tests."""

FULLSPACE_RUN = {
    "setting": "fullspace",
    "N": 3,
    "t": 0.2,
    "x": 0.5,
    "potential": {"c": 0.3, "beta": 2.0, "cap": 4.0},
    "initial": {"kind": "gaussian_bump", "radius": 1.0},
    "grid": {"t_end": 0.2, "dt": 0.05, "n_paths": 4000},
}

PDE_SOLVE = {
    "N": 3,
    "potential": {"c": 0.0, "cap": 0.0},
    "initial": {"kind": "gaussian_bump", "radius": 1.0},
    "t": 0.5,
    "grid": {"n_r": 201, "n_t": 100},
}

SWEEP = {
    "setting": "fullspace",
    "N": 3,
    "c_list": [0.5],
    "m_list": [2, 4],
    "t": 0.2,
    "x": 0.0,
    "grid": {"t_end": 0.2, "dt": 0.05, "n_paths": 2000},
}
