"""
Exposure and load indices
=========================

Exposure sums the probability of arriving at a zone from each other zone;
load multiplies arrivals by the mean time spent there.
"""

# %%
from trackmetrics.patterns import exposure_index, load_index, load_ratio, transition_matrix

# 100 walkers leave the food court, 100 leave the entrance
sequences = (
    [["food", "shop"]] * 73 + [["food", "toilets"]] * 27
    + [["entrance", "shop"]] * 40 + [["entrance", "food"]] * 60
)
m = transition_matrix(sequences, ["entrance", "food", "shop", "toilets"])
for zone, value in exposure_index(m).items():
    print(f"{zone:9s} exposure {value:.2f}")

# %%
peak = (600, 1528.3)      # arrivals, mean seconds in zone
baseline = (150, 931.6)
print(f"peak load {load_index(*peak):,.0f} person-s, baseline {load_index(*baseline):,.0f} person-s")
print(f"ratio {load_ratio(peak, baseline):.2f}")
