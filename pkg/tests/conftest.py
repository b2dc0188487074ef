"""Shared fixtures: grids, shipped structures, and prebuilt random models."""
from __future__ import annotations

import numpy as np
import pytest

from regpara.grid import Grid
from regpara.library import structure
from regpara.models import build_g, build_pi, g_as_model
from regpara.norms import synthesize


@pytest.fixture(scope="session")
def grid256():
    return Grid(1, 256, np.pi)


@pytest.fixture(scope="session")
def grid512():
    return Grid(1, 512, np.pi)


@pytest.fixture(scope="session")
def toy_structure():
    return structure("toy")


@pytest.fixture(scope="session")
def bhz_structure():
    return structure("bhz")


def build_random_model(S, grid, seed=20):
    rep = S.check_assumptions()
    roots = sorted(rep.c_generators, key=lambda n: (S.plus_gens[n], n))
    gb = {r: synthesize(float(S.plus_gens[r]), seed=seed + i, grid=grid)
          for i, r in enumerate(roots)}
    g = build_g(S, grid, gb)
    negs = sorted((n for n, h in S.base_gens.items() if h < 0),
                  key=lambda n: (S.base_gens[n], n))
    pib = {n: synthesize(float(S.base_gens[n]), seed=seed + 1000 + i, grid=grid)
           for i, n in enumerate(negs)}
    model = build_pi(S, grid, g, pib)
    return model, gb, pib


@pytest.fixture(scope="session")
def toy_model(toy_structure, grid512):
    return build_random_model(toy_structure, grid512)


@pytest.fixture(scope="session")
def bhz_model(bhz_structure, grid512):
    return build_random_model(bhz_structure, grid512)


@pytest.fixture(scope="session")
def toy_g_model(toy_structure, grid512, toy_model):
    model, _gb, _pib = toy_model
    return g_as_model(toy_structure, grid512, model.g)


@pytest.fixture(scope="session")
def bhz_g_model(bhz_structure, grid512, bhz_model):
    model, _gb, _pib = bhz_model
    return g_as_model(bhz_structure, grid512, model.g)
