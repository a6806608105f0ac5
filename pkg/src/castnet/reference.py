"""Observed results from the original two-story survey deployment.

The respondent-level data behind these figures was never published, so none
of them can be recomputed from what ships in this repository. They are kept
as descriptive metadata: plausibility anchors for new deployments and fixed
points for documentation. Do not use them as test targets; the only parts a
test may check are internal consistencies (the density and degree figures
follow from the node and edge counts).

The deployment annotated a 13-character short story with 17 respondents.
"""

from __future__ import annotations

# Tab-style summary of the three networks over the same 13 characters:
# the Task 1 entry sums, the computer extraction, and the Task 2 matrix.
REFERENCE_NETWORK_METRICS = {
    "task1": {"n_nodes": 13, "n_edges": 16, "density": 0.1025641,
              "average_degree": 2.4615385},
    "computer": {"n_nodes": 13, "n_edges": 21, "density": 0.1346154,
                 "average_degree": 3.2307692},
    "task2": {"n_nodes": 13, "n_edges": 24, "density": 0.1538462,
              "average_degree": 3.6923077},
}

# Whole-population correlations between each human task network and each
# computer extraction variant (unit kind).
REFERENCE_TASK_ALGORITHM_CORRELATIONS = {
    ("task1", "paragraph"): 0.84,
    ("task1", "sentence"): 0.91,
    ("task2", "paragraph"): 0.70,
    ("task2", "sentence"): 0.58,
}

# Logistic regression of academic background against between-task agreement.
# The science/medical p-value was reported only as an upper bound.
REFERENCE_BACKGROUND_EFFECTS = {
    "arts_humanities": {"parameter": 0.05, "p_value": 0.37,
                        "p_value_is_upper_bound": False},
    "social_science": {"parameter": -0.03, "p_value": 0.71,
                       "p_value_is_upper_bound": False},
    "science_medical": {"parameter": 0.16, "p_value": 0.01,
                        "p_value_is_upper_bound": True},
}

REFERENCE_RESPONDENT_COUNT = 17

# Cleaning defaults used in the deployment: links at 11 or more on the
# summed 0-10 scales were endorsed by at least two respondents.
REFERENCE_BINARIZE_THRESHOLD = 11.0
REFERENCE_SIGMA_KS = (2.0, 3.0)

# The deployment split stories into 4 parts and found a falling profile.
REFERENCE_N_PARTS = 4
REFERENCE_HUMAN_SHAPE = "anti_climax"
