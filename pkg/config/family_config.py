"""
Teszt család konfiguráció - a kilenc fázisú MBT ráta mintázatai
"""

# Fázisok száma
N_PHASES = 9

# D0 átlón kívüli elemei 10^-3 egységben; az átlót a sorösszeg feltétel adja
D0_SCALE = 1e-3
D0_OFF_DIAGONAL = [
    [0, 6, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 6, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 6, 0, 0, 0, 0, 0],
    [6, 0, 0, 0, 1, 1, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 6, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 6, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 6],
    [1, 0, 0, 0, 1, 6, 0, 0, 0],
]

# D1 = 10^-2 diag(p, p, p, p, 5, 4, 4, 4, 4); None helyére p kerül
D1_SCALE = 1e-2
D1_PATTERN = [None, None, None, None, 5.0, 4.0, 4.0, 4.0, 4.0]

# Gyermek fázisa. A 9. sor nyomtatott alakja (1 0 0 0 1 0 0 0 0) 2-re összegződik;
# az e5 sor adja vissza a publikált rho(R), l, d értékeket.
P1 = [
    [1.0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 1.0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 1.0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 1.0, 0, 0, 0, 0, 0],
    [0.1, 0, 0, 0, 0.9, 0, 0, 0, 0],
    [0, 0, 0, 0, 1.0, 0, 0, 0, 0],
    [0, 0, 0, 0, 1.0, 0, 0, 0, 0],
    [0, 0, 0, 0, 1.0, 0, 0, 0, 0],
    [0, 0, 0, 0, 1.0, 0, 0, 0, 0],
]

# Szülő fázisa a születés után
P0 = [
    [0, 0, 0, 0, 1.0, 0, 0, 0, 0],
    [0, 0, 0, 0, 1.0, 0, 0, 0, 0],
    [0, 0, 0, 0, 1.0, 0, 0, 0, 0],
    [0, 0, 0, 0, 1.0, 0, 0, 0, 0],
    [0.1, 0, 0, 0, 0.9, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 1.0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 1.0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 1.0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 1.0],
]

# Halálozási ráta: e5, skálázva
DEATH_PHASE = 4  # nulla alapú index
DEATH_SCALES = {
    'unit': 1.0,
    'milli': 1e-3,
}

# A Table 1 rho(R) oszlopát a 'unit' skála reprodukálja (4 tizedesjegyre)
CANONICAL_DEATH_SCALE = 'unit'
