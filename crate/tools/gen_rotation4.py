#!/usr/bin/env python3
"""Regenerate crates/core/data/kruskemper4.txt.

Constructs the 4x4 orthogonal full-diversity rotation from the totally
real quartic field of discriminant 725 (x^4 - x^3 - 3x^2 + x + 1):
alpha = u/p'(theta) with u a unit chosen so alpha is totally positive,
which makes the trace form Tr(alpha x y) on Z[theta] an odd unimodular
positive-definite rank-4 lattice, hence isometric to Z^4. An orthonormal
basis under that form gives the rotation; its raw minimum product
distance is sqrt(N(alpha)) = 1/sqrt(725), so the normalized (fourth-root)
value is 725**(-1/8) = 0.438993...

Requires sympy and mpmath. The emitted file carries a sha256 of the
numeric payload which the loader verifies.
"""
import hashlib
import itertools
import os

import mpmath as mp
import sympy as sp

mp.mp.dps = 60

x = sp.symbols("x")
p = x**4 - x**3 - 3 * x**2 + x + 1
assert sp.discriminant(p, x) == 725

roots = sorted(sp.Poly(p, x).all_roots(), key=lambda r: sp.N(r))
theta = [mp.mpf(str(sp.N(r, 60))) for r in roots]


def embed_all(coeffs):
    return [sum(mp.mpf(str(c)) * t**k for k, c in enumerate(coeffs)) for t in theta]


def field_norm_exact(coeffs):
    el = sum(sp.Integer(c) * x**k for k, c in enumerate(coeffs))
    return sp.resultant(p, el, x)


delta_coeffs = [1, -6, -3, 4]  # p'(theta)
delta_emb = embed_all(delta_coeffs)
assert abs(field_norm_exact(delta_coeffs)) == 725
dsigns = [mp.sign(d) for d in delta_emb]

unit = None
for c in itertools.product(range(-3, 4), repeat=4):
    if c == (0, 0, 0, 0):
        continue
    if abs(field_norm_exact(c)) == 1:
        em = embed_all(c)
        if [mp.sign(v) for v in em] == dsigns:
            unit, unit_emb = c, em
            break
assert unit is not None, "no sign-matching unit in the search box"

alpha_emb = [u / d for u, d in zip(unit_emb, delta_emb)]
assert all(a > 0 for a in alpha_emb)


def gram_entry(i, k):
    v = mp.fsum(a * t ** (i + k) for a, t in zip(alpha_emb, theta))
    r = mp.nint(v)
    assert abs(v - r) < mp.mpf("1e-40"), (i, k, v)
    return int(r)


G = [[gram_entry(i, k) for k in range(4)] for i in range(4)]
Gm = sp.Matrix(G)
assert Gm.det() == 1, Gm.det()

Ginv = Gm.inv()
bound = [int(mp.floor(mp.sqrt(float(Ginv[i, i])))) + 1 for i in range(4)]
mins = []
for v in itertools.product(*[range(-b, b + 1) for b in bound]):
    if any(v) and sum(v[i] * G[i][k] * v[k] for i in range(4) for k in range(4)) == 1:
        mins.append(v)

chosen = []
for v in mins:
    if all(sum(v[i] * G[i][k] * w[k] for i in range(4) for k in range(4)) == 0 for w in chosen):
        cand = sp.Matrix(chosen + [list(v)])
        if cand.rank() == len(chosen) + 1:
            chosen.append(list(v))
    if len(chosen) == 4:
        break
T = sp.Matrix(chosen)
assert T * Gm * T.T == sp.eye(4)

S = [[mp.sqrt(alpha_emb[j]) * embed_all(chosen[i])[j] for j in range(4)] for i in range(4)]

err = max(
    abs(mp.fsum(S[i][k] * S[j][k] for k in range(4)) - (1 if i == j else 0))
    for i in range(4)
    for j in range(4)
)
assert err < mp.mpf("1e-50"), err

best = min(
    mp.fprod(abs(mp.fsum(v[i] * S[i][j] for i in range(4))) for j in range(4))
    for v in itertools.product(range(-3, 4), repeat=4)
    if any(v)
)
assert abs(best - 1 / mp.sqrt(725)) < mp.mpf("1e-40"), best
print("nmpd =", mp.nstr(best ** mp.mpf("0.25"), 12))

lines = [" ".join(mp.nstr(S[i][j], 17, strip_zeros=False) for j in range(4)) for i in range(4)]
payload = "\n".join(lines) + "\n"
digest = hashlib.sha256(payload.encode()).hexdigest()

path = os.path.join(os.path.dirname(__file__), "..", "crates", "core", "data", "kruskemper4.txt")
with open(path, "w") as f:
    f.write(f"# rotation: kruskemper4\n# dim: 4\n# sha256: {digest}\n")
    f.write(payload)
print("wrote", os.path.normpath(path))
