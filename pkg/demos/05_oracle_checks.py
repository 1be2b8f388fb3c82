"""Run a reduced oracle battery and print the verdicts."""
import json

from mrfjunta.battery import run_oracle_battery

small = {"instances": 5, "juntas": 5, "n_max": 8}
spec = {"checks": [
    {"name": "irrelevant_zero", **small},
    {"name": "factorization", **small},
    {"name": "factorization_control"},
    {"name": "density_ratio", **small},
    {"name": "unbiasedness", **small},
    {"name": "conditional_floor", **small},
    {"name": "anticoncentration", "polynomials": 6, "trials": 20_000},
    {"name": "completeness", "instances": 1, "smoothings": 50},
]}
for verdict in run_oracle_battery(spec):
    print(json.dumps(verdict))
