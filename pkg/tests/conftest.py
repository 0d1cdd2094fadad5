"""
Közös teszt fixture-ök
"""
import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from core.qve_model import MbtRates, Qve, from_rates
from experiments.table_reproducer import TableReproducer


@pytest.fixture
def scalar_qve():
    """x = 0.2 + 0.8 x^2, minimális megoldás 0.25"""
    return Qve([0.2], [[0.8]])


@pytest.fixture
def subcritical_qve():
    return Qve([0.6], [[0.4]])


@pytest.fixture
def critical_qve():
    return Qve([0.5], [[0.5]])


@pytest.fixture
def immediate_death_qve():
    return Qve([1.0], [[0.0]])


@pytest.fixture
def two_phase_rates():
    """Kétfázisú, erősen szuperkritikus MBT ráták"""
    return MbtRates(
        D0=[[-4.0, 1.0], [1.0, -5.0]],
        D1_diag=[2.5, 3.0],
        death=[0.5, 1.0],
        P0=[[0.0, 1.0], [1.0, 0.0]],
        P1=[[1.0, 0.0], [0.5, 0.5]],
    )


@pytest.fixture
def two_phase_qve(two_phase_rates):
    return from_rates(two_phase_rates)


@pytest.fixture(scope='session')
def family_case():
    """A teszt család megoldott példányai p szerint, munkamenetenként egyszer számolva"""
    reproducer = TableReproducer()
    cache = {}

    def get(p: float):
        if p not in cache:
            cache[p] = reproducer.family_case(p)
        return cache[p]

    return get


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
