"""Reliable delivery of one data qubit over a lossy channel.

A data qubit is encoded into three sharings; any two reconstruct it.  The
sender transmits the first sharing, then the second.  Losing a first
costs nothing (the sender re-encodes from its two retained sharings);
losing a second recurses one round deeper, and the receiver must hold
every accepted first sharing until a second finally lands.  Expected
delivery time over a channel with per-sharing success probability p is
(1+p)/p^2 slots.
"""

from qdnsim import SharingTransfer, Stage, advance
from qdnsim.rng import stream

print("an unlucky delivery, step by step:")
transfer = SharingTransfer(qubit=0)
receiver_units = 0
for slot, success in enumerate([True, False, False, True, True], start=1):
    kind = "first" if transfer.stage is Stage.FIRST else "second"
    round_k = transfer.round
    delta, delivered = advance(transfer, success)
    receiver_units += delta
    outcome = "ok" if success else "LOST"
    state = ("delivered, receiver releases everything" if delivered
             else f"round {transfer.round}, receiver holds {receiver_units}")
    print(f"  slot {slot}: send {kind} sharing of round {round_k}: "
          f"{outcome} -> {state}")

print("\nMonte Carlo mean delivery slots vs (1+p)/p^2:")
rng = stream(1, "demo-delivery")
for p in (0.5, 0.65, 0.84, 1.0):
    total = 0
    trials = 20_000
    for _ in range(trials):
        t = SharingTransfer(qubit=0)
        slots = 0
        while t.stage is not Stage.DELIVERED:
            slots += 1
            advance(t, bool(rng.random() < p))
        total += slots
    print(f"  p={p:.2f}: simulated {total / trials:.3f}, "
          f"closed form {(1 + p) / p ** 2:.3f}")
