"""Impersonate a GH prover without its key, then watch the same trick fail on SGIP."""

from graphauth import evaluate_adversary, generate_key, tensor_forgery

gh = generate_key("gh", 1)
forger = tensor_forgery(gh.public)
print(f"GH public graphs: g1 order {gh.public.g1.order}, g2 order {gh.public.g2.order}")
print(f"forged commitment: {forger.product.order} vertices, {forger.product.size} edges")
print(evaluate_adversary(forger, gh.public, 20, 10, 1, attack="tensor").summary())

sgip = generate_key("sgip", 1)
report = evaluate_adversary(tensor_forgery(sgip.public), sgip.public, 20, 10, 1, attack="tensor")
print(report.summary())
print("first rejection reasons:", sorted({o["reason"] for o in report.outcomes}))
