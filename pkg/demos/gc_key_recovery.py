"""A verifier that always asks for the colouring learns the whole private key of GC.

The same observation is useless against GC+SGIP, whose commitments are always
smaller than the public graph.
"""

from graphauth import HonestProver, generate_key
from graphauth.attacks import attempt_recovery, evaluate_gi_impersonation, observe_rounds
from graphauth.graphs import is_proper_coloring

gc = generate_key("gc", 3, n=50)
[(commitment, response)] = observe_rounds(HonestProver(gc), 1, seed=3)
attempt = attempt_recovery(gc.public, commitment, response)
print(f"GC: recovery {attempt.status} in {attempt.seconds * 1000:.1f} ms; "
      f"proper on gamma: {is_proper_coloring(attempt.coloring, gc.public.gamma)}")
print(evaluate_gi_impersonation(HonestProver(gc), gc.public, 10, 10, 3).summary())

gcsgip = generate_key("gcsgip", 3)
[(commitment, response)] = observe_rounds(HonestProver(gcsgip), 1, seed=3)
print(f"GC+SGIP: commitment order {commitment.graph.order} vs gamma order {gcsgip.public.gamma.order}; "
      f"recovery {attempt_recovery(gcsgip.public, commitment, response).status}")
print(evaluate_gi_impersonation(HonestProver(gcsgip), gcsgip.public, 200, 10, 3).summary())
