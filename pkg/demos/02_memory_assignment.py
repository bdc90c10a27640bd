"""How a node assigns scarce quantum memory to competing sessions.

Each session asks for a window of W qubits; a window unit costs one
memory unit at a receiver, two at a repeater, and 9/4 under threshold
sharing.  When total demand exceeds the pool, sessions are halved in
descending-window order until the remainder fits, so nobody is halved
twice and nobody is starved.
"""

from fractions import Fraction

from qdnsim import Demand, assign_memory, partition
from qdnsim.memory import TAG_SEND_COST, TAG_SPLIT, TELE_SPLIT


def show(windows, capacity, unit_cost=Fraction(1)):
    demands = [Demand(i, w, unit_cost) for i, w in enumerate(windows)]
    grants = assign_memory(demands, capacity)
    cells = [
        f"s{i}: {windows[i]}->{grants[i].window}{'*' if grants[i].congested else ''}"
        for i in range(len(windows))
    ]
    used = sum(d.cost(grants[d.session].window) for d in demands)
    print(f"  demand {windows} vs capacity {capacity}: "
          f"{', '.join(cells)}  (used {used})")


print("A 1000-unit quantum computer splits its memory by role:")
print(f"  teleportation: send/receive = {partition(1000, TELE_SPLIT)}")
print(f"  tell-and-go:   send/receive = {partition(1000, TAG_SPLIT)}")

print("\nEverything fits: full grants, no congestion marks")
show([2, 1], capacity=10)

print("\nOversubscribed: the largest window is halved first (* = halved)")
show([6, 5, 2], capacity=10)

print("\nDeep oversubscription cuts a prefix of the sorted demands")
show([3, 3, 3], capacity=5)

print("\nThreshold-sharing windows cost 9/4 units each (three sharings")
print("for at most three quarters of the window):")
show([4, 4], capacity=20, unit_cost=TAG_SEND_COST)
