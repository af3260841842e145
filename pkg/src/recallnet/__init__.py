"""Simulator for memory-decaying tie strength under adversarial edge deletion.

Networks evolve in discrete cycles: edge weights decay multiplicatively,
an adversary deletes the most predictable edges, and sufficiently similar
node pairs probabilistically reconnect. A metric suite (utility, attack
success rate, recall-value ratios, average path length) is evaluated over
seeded Monte-Carlo parameter sweeps on synthetic topologies.
"""

__version__ = "0.1.0"
