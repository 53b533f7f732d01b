import pytest

from ttlock.netlist import parse_bench

C17_BENCH = """\
# classic 6-gate NAND circuit
INPUT(G1)
INPUT(G2)
INPUT(G3)
INPUT(G6)
INPUT(G7)
OUTPUT(G22)
OUTPUT(G23)
G10 = NAND(G1, G3)
G11 = NAND(G3, G6)
G16 = NAND(G2, G11)
G19 = NAND(G11, G7)
G22 = NAND(G10, G16)
G23 = NAND(G16, G19)
"""

DIAMOND_BENCH = """\
INPUT(a)
OUTPUT(o)
g1 = NOT(a)
g2 = NOT(g1)
g3 = NOT(a)
o = AND(g2, g3)
"""


@pytest.fixture
def c17():
    return parse_bench(C17_BENCH, name="c17")


@pytest.fixture
def diamond():
    return parse_bench(DIAMOND_BENCH, name="diamond")
