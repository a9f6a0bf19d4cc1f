"""Frozen numeric tables for the face polytopes and interval margins.

Every constant here is an outer bound: it must hold for the true angle
vector of the corresponding face kind over the standard distance window
[0.9972, 1.021].  The machine-generated cuts were measured on admissible
samples (random walks accepted by the blocked-flip test in geom) and
rounded outward; regenerate and compare with tools/gen_polytopes.py.

Adjacency below always refers to positions along the face cycle.
"""

# Distance window the tables were calibrated for.  level1 only emits the
# face cuts when the requested window sits inside this one.
TABLE_D_WINDOW = (0.99719, 1.02111)

# Quadrilateral: adjacent-corner sum window (rhombus with side d).
QUAD_SUM = (3.6339, 3.779657)

# Pentagon, valid under every dihedral relabeling of the cycle:
#   PENT_QUOTED_LO <= c0 + c1 - 0.63*c3 <= PENT_QUOTED_HI
#   c0 + c2 + 1.8*c1 <= PENT_QUOTED2_HI
PENT_QUOTED_LO = 2.96
PENT_QUOTED_HI = 3.26
PENT_QUOTED2_HI = 9.05

# Pentagon aggregate cuts (measured range plus 0.03 outward margin;
# sharpest witness is the optimal configuration's pentagon at 11.1213).
PENT_SUM = (11.11, 11.86)
PENT_ADJ_LO = 3.72
PENT_SKIP_LO = 3.00

# Hexagon without an interior vertex.  Three alternatives: one opposite
# pair of corners is small, the remaining four are large.
HEX_PAIR = (1.2, 1.34)
HEX_BIG_LO = 2.9
# Aggregate sum window; the sampler minimum was 14.7592 but the optimal
# configuration's hexagon sits at 14.7553, hence the wide 0.1 margin.
HEX_SUM = (14.65, 15.08)

# Hexagon hosting an interior vertex: corner sum lower bound.
HEX_HOST_SUM_LO = 15.936

# Lipschitz bounds for interval propagation, measured max |partial| on
# admissible samples times a safety factor of 2.
LIP_PENT_COMPLETE = 5.0    # measured 2.43
LIP_HEX_COMPLETE = 6.0     # measured 2.67
LIP_LAMBDA = 30.0          # measured 14.43
LIP_FLIP = 3.0             # measured 1.30

# Box-width gates: propagation or a test only runs when the summed
# half-widths of its inputs are below the gate, keeping margins useful.
GATE_COMPLETION = 0.25
GATE_CLEARANCE = 0.06
