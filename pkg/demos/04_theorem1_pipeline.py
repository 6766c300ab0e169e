"""
End to end: |f - g| <= eps and Lip(g) <= Lip(f) + eps
====================================================

smooth rescales f to a 1-Lipschitz F, splits signs, slices, smooths every
slice, glues with theta_n and maps back. verify_theorem1 measures the result.
"""
# %%
from lipsmooth import Box, sample, smooth, verify_theorem1
from lipsmooth.corpus import select

box = Box(-1, 1)
for oracle in select(["abs", "max_affine", "sawtooth_L2", "sine_L5"]):
    f = sample(oracle, box, (4096,))
    for eps in (0.05, 0.1):
        r = smooth(f, eps)
        rep = verify_theorem1(f, r, eps, name=oracle.name)
        print(f"{oracle.name:12s} eps={eps:<5} sup_err={rep.sup_error_measured:.4f} "
              f"Lip(g)={rep.lip_output_measured:.4f} <= {rep.bound_lip:.4f}  "
              f"slices={r.provenance['N']}  refine x{r.provenance['refine'][0]}  "
              f"{'PASS' if rep.passed_strict else 'FAIL'}")

# %%
# every run records its stages; a report only passes when all of them do
print(len(r.provenance["stages"]), "stage records, first:", r.provenance["stages"][0]["stage"])
