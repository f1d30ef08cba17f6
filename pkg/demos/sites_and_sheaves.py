"""Build the site of a small (C, F) presentation and test some presheaves.

    python3 demos/sites_and_sheaves.py
"""
from pcfv.sites import (
    CFPresentation, build_site, check_site, delta_site, is_sheaf, representable,
    set_presheaf, sheafify_representable, site_from_basis, sum_sites,
)
from pcfv.ssp import closure, full_ssp, pp
from pcfv.syntax import NAT, parse_type

# a single type over {a, b} whose observations separate a from b
cf = CFPresentation({"s": full_ssp({"a", "b"})}, [("id", "s", "s", {"a": "a", "b": "b"})])
site = build_site(cf)
print(site)
print("checks:", check_site(site))

top = ("s", frozenset("ab"))
print("\nΔ at (s,{a,b}):", sorted(map(sorted, delta_site(site).values[top])))
print("Set(|-|, 2) is a sheaf:", is_sheaf(set_presheaf(site, (0, 1))) is None)
fail = is_sheaf(representable(site, top))
print("y(s,{a,b}):", fail, "family", fail.family)
glued = sheafify_representable(site, top)
print("after one amalgamation pass:", glued.values[top])

print("\nclosure of {{a},{b,c}}:", closure("abc", [pp("a", "bc")]))
print("sum of two copies:", sum_sites([site, site]))

cf = site_from_basis(1, budget=6, types=[NAT, parse_type("nat -> nat")])
print("\nF(nat) from tabulated terms:", cf.objects["nat"])
