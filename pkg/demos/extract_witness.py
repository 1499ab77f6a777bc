"""Answers to both challenges for one commitment reveal a solution of the hard problem.

This is why a prover must never answer both bits for the same commitment, and why
a cheater who could always answer would have to solve the underlying problem.
"""

from graphauth import SplitMix64, commit, extract_gcsgip_witness, extract_sgip_witness, generate_key, respond
from graphauth.graphs import graph_of, is_isomorphism, is_proper_coloring, is_subgraph_of

sgip = generate_key("sgip", 5)
c, secret = commit(sgip, SplitMix64(5))
sub, iso = extract_sgip_witness(sgip.public, c, respond(sgip, secret, 0), respond(sgip, secret, 1))
print(f"SGIP: subgraph of omega with {sub.order} vertices; in omega: {is_subgraph_of(sub, sgip.public.omega)}; "
      f"isomorphic to g2: {is_isomorphism(iso, graph_of(sub), sgip.public.g2)}")

key = generate_key("gcsgip", 5)
c, secret = commit(key, SplitMix64(5))
sub, col = extract_gcsgip_witness(key.public, c, respond(key, secret, 0), respond(key, secret, 1))
print(f"GC+SGIP: order-{sub.order} subgraph of gamma; in gamma: {is_subgraph_of(sub, key.public.gamma)}; "
      f"{col.k}-colouring proper: {is_proper_coloring(col, graph_of(sub))}")
