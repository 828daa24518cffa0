import pytest

from pnvc.net import parse_net

# Two-transition cycle shuttling one token between p1 and p2, producing on
# p3 every round: p1/p2 are mutually exclusive and p3 is unbounded.
NET_A_TEXT = """\
net netA
places p1 p2 p3
transition t1
  in  p1:1
  out p2:1 p3:1
transition t2
  in  p2:1
  out p1:1
marking p1:1
"""

# Two independent producer/consumer cycles over a 4-place core; t5..t8 copy
# t1..t4 except they use p6 where the originals use p5, so p5 and p6 are
# interchangeable from the core's point of view.
NET_B_TEXT = """\
net netB
places p1 p2 p3 p4 p5 p6
transition t1
  in  p1:1
  out p2:1 p5:1
transition t2
  in  p2:1 p5:1
  out p1:1
transition t3
  in  p3:1
  out p4:1 p5:1
transition t4
  in  p4:1 p5:1
  out p3:1
transition t5
  in  p1:1
  out p2:1 p6:1
transition t6
  in  p2:1 p6:1
  out p1:1
transition t7
  in  p3:1
  out p4:1 p6:1
transition t8
  in  p4:1 p6:1
  out p3:1
marking p1:1 p3:1
"""


@pytest.fixture(scope="session")
def net_a():
    return parse_net(NET_A_TEXT)


@pytest.fixture(scope="session")
def net_b():
    return parse_net(NET_B_TEXT)
