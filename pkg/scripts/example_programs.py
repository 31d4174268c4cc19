"""Solve the two small example programs (CNF formula, bin packing) and cross-check with brute force."""

from stablemodels.generators import KnapsackSpec, example_formula, gen_knapsack, gen_sat
from stablemodels.oracle import enumerate_stable_brute
from stablemodels.parser import serialize_program
from stablemodels.program import agrees
from stablemodels.search import enumerate_models


def show(title, program, assumptions):
    print(f"== {title}")
    print(serialize_program(program), end="")
    models = enumerate_models(program, assumptions)
    brute = [m for m in enumerate_stable_brute(program) if agrees(m, assumptions)]
    for m in models:
        print("  ", " ".join(program.names(m)) or "(empty)")
    agree = set(models) == set(brute)
    print(f"   {len(models)} models, brute force {'agrees' if agree else 'DISAGREES'}\n")


def main():
    show("formula (a|b|-c)&(-a|b|-d)&(-b|c|d)", *gen_sat(example_formula()))
    show("packing, weights 2,3 values 3,4, weight < 4, value >= 3", *gen_knapsack(KnapsackSpec((2, 3), (3, 4), 4, 3)))


if __name__ == "__main__":
    main()
