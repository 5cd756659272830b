#!/usr/bin/env python3
"""Generate WTREC class-group records with PARI/GP (via cypari2).

Produces the 3-part of the S-class group (S = primes above 3) for tower
layers k'_n = k' B_n and for k(mu_9), k(mu_3), together with Galois action
matrices and norm maps, in the plain-text record format read by
`wildtame ingest`.

Matrix convention: column j is the image of generator j, written row-major.

Usage: gen_records.py OUTDIR [--quick]
"""

import os
import sys

import cypari2

pari = cypari2.Pari()
pari.allocatemem(2 * 10**9)
gp = pari

GP_SOURCE = r"""
basepol(d) = if (d % 4 == 1, x^2 - x - (d - 1)/4, x^2 - d);

\\ minimal polynomial of 2cos(2 pi / 3^(n+1)) via g_n(x) = g_{n-1}(x^3 - 3x)
cospol(n) = my(g = x + 1); for (i = 1, n, g = subst(g, x, x^3 - 3*x)); g;

\\ canonical compositum: Res_y(b(y), g(x - y)), monic, sign-normalized;
\\ returns [F, eps] with theta = eps * (alpha + beta)
canon(b, g) = {
  my(R = polresultant(subst(b, x, y), subst(g, x, x - y), y));
  R = R / pollead(R);
  my(n = poldegree(R), Rm = (-1)^n * subst(R, x, -x), s = 0);
  forstep (k = n - 1, 0, -2, my(c = polcoef(R, k)); if (c != 0, s = sign(c); break));
  if (s > 0, [Rm, -1], [R, 1]);
}

\\ alpha and beta inside nf = Q[x]/F with x = eps*(alpha + beta)
splitgen(nf, b, g, eps) = {
  my(rs = nfroots(nf, subst(b, x, varhigher("t"))));
  for (i = 1, #rs, my(a = lift(rs[i]), be = lift(Mod(eps * x - a, nf.pol)));
    if (lift(Mod(subst(g, x, be), nf.pol)) == 0, return([a, be])));
  error("no compatible alpha");
}

\\ 3-part of the S-class group: [factors ascending, P: Cl -> A', L: A' -> Cl]
aprime(bnf) = {
  my(cyc = bnf.cyc, r = #cyc, S = idealprimedec(bnf, 3));
  if (r == 0, return([[], matrix(0, 0), matrix(0, 0)]));
  my(M = matconcat([matdiagonal(cyc), Mat(vector(#S, i, bnfisprincipal(bnf, S[i], 0)))]));
  my(H = mathnf(M), R = matsnf(H, 1), U = R[1], D = R[3]);
  my(idx = [], facs = []);
  forstep (i = r, 1, -1, my(v = valuation(D[i, i], 3));
    if (v > 0, idx = concat(idx, i); facs = concat(facs, 3^v)));
  my(k = #idx, Ui = U^-1);
  my(P = matrix(k, r, a, c, U[idx[a], c] % facs[a]));
  my(L = matrix(r, k, a, c, Ui[a, idx[c]] % cyc[a]));
  [facs, P, L];
}

reducerows(A, facs) = matrix(#A[, 1], #A, i, j, A[i, j] % facs[i]);

\\ action of the automorphism x -> s on A'
actmat(bnf, ap, s) = {
  my(facs = ap[1], k = #facs);
  if (k == 0, return(matrix(0, 0)));
  my(G = Mat(vector(#bnf.gen, j, bnfisprincipal(bnf, nfgaloisapply(bnf, s, bnf.gen[j]), 0))));
  reducerows(ap[2] * G * ap[3], facs);
}

\\ norm of an ideal of nfn down to nfm, with emb the image of nfm's root
normdown(nfn, nfm, emb, I) = {
  my(F = idealfactor(nfn, I), J = idealhnf(nfm, 1));
  for (t = 1, #F~,
    my(P = F[t, 1], e = F[t, 2], Q = idealprimedec(nfm, P.p), found = 0);
    for (u = 1, #Q,
      my(pq = nfbasistoalg(nfm, Q[u].gen[2]), img = subst(lift(pq), x, emb));
      if (nfeltval(nfn, img, P) > 0,
        J = idealmul(nfm, J, idealpow(nfm, Q[u], e * P.f / Q[u].f)); found = 1; break));
    if (!found, error("no prime below")));
  J;
}

normmat(bnfn, apn, bnfm, apm, emb) = {
  my(kn = #apn[1], km = #apm[1]);
  if (kn == 0 || km == 0, return(matrix(km, kn)));
  my(Nc = Mat(vector(#bnfn.gen, j, bnfisprincipal(bnfm, normdown(bnfn, bnfm, emb, bnfn.gen[j]), 0))));
  reducerows(apm[2] * Nc * apn[3], apm[1]);
}

coinv(ap, A) = {
  my(facs = ap[1], k = #facs);
  if (k == 0, return([]));
  my(M = matconcat([matdiagonal(facs), A - matid(k)]));
  select(z -> z != 1, matsnf(mathnf(M)));
}
"""

for chunk in GP_SOURCE.strip().split("\n\n"):
    # one definition per call; comment lines dropped since the library parser joins lines
    gp("\n".join(l for l in chunk.splitlines() if not l.lstrip().startswith("\\\\")))


def ints(v):
    return [int(t) for t in v]


def mat_rows(m, rows, cols):
    return [[int(m[i, j]) for j in range(cols)] for i in range(rows)]


def label_quadratic(d):
    return f"Q(sqrt({d}))"


def write_record(outdir, fname, label, pol, facs, actions, norm, provenance):
    coeffs = ints(gp(f"Vecrev({pol})"))
    lines = ["WTREC 1"]
    lines.append("field %s %d %s" % (label, len(coeffs) - 1, " ".join(map(str, coeffs))))
    lines.append("group" + "".join(" %d" % f for f in facs))
    k = len(facs)
    for name, m in actions:
        ent = [str(x) for row in m for x in row]
        lines.append(("action %s " % name + " ".join(ent)).rstrip())
    if norm is not None:
        tgt, rows, cols, m = norm
        ent = [str(x) for row in m for x in row]
        lines.append(("norm_to %s %d %d %s" % (tgt, rows, cols, " ".join(ent))).rstrip())
    lines.append("provenance " + provenance)
    with open(os.path.join(outdir, fname), "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return k


PROV = "pari-gp-%s bnfinit(nf,1) s-class-3-part" % ".".join(str(t) for t in pari.version()[:3])


def tower(outdir, d, nmax):
    """Records for k' = Q(sqrt(d)) and its layers up to nmax."""
    gp(f"b = basepol({d})")
    prev = None
    slug = ("m%d" % -d) if d < 0 else ("p%d" % d)
    for n in range(nmax + 1):
        if n == 0:
            gp("F = b; eps = 1; nf = nfinit(F); al = x; be = 0")
        else:
            gp(f"g = cospol({n}); c = canon(b, g); F = c[1]; eps = c[2]")
            gp("nf = nfinit(F); ab = splitgen(nf, b, g, eps); al = ab[1]; be = ab[2]")
            assert int(gp("polisirreducible(F)")) == 1
        gp("B = bnfinit(nf, 1); ap = aprime(B)")
        facs = ints(gp("ap[1]"))
        k = len(facs)
        label = label_quadratic(d) if n == 0 else "%s[n=%d]" % (label_quadratic(d), n)
        actions = []
        if n > 0:
            gp("s = lift(Mod(eps * (al + subst(x^4 - 4*x^2 + 2, x, be)), F))")
            gp("Ag = actmat(B, ap, s)")
            actions.append(("gamma", mat_rows(gp("Ag"), k, k)))
        else:
            gp("Ag = matid(#ap[1])")
        norm = None
        if n > 0:
            if n == 1:
                gp("emb = al")
            else:
                gp("emb = lift(Mod(peps * (al + subst(x^3 - 3*x, x, be)), F))")
            gp("Nm = normmat(B, ap, Bp, app, emb)")
            km = len(prev[1])
            norm = (prev[0], km, k, mat_rows(gp("Nm"), km, k))
        write_record(outdir, "kp_%s_n%d.wtrec" % (slug, n), label, gp("F"), facs, actions, norm, PROV)
        co = gp("coinv(ap, Ag)")
        print(d, n, facs, "coinvariants", co, flush=True)
        gp("Bp = B; app = ap; peps = eps")
        prev = (label, facs)


def cyclo(outdir, d, m):
    """Record for Q(sqrt(d), zeta_{3^m}) with gamma (m = 2 only) and delta."""
    q = 3**m
    gp(f"b = basepol({d}); g = polcyclo({q}); c = canon(b, g); F = c[1]; eps = c[2]")
    gp("nf = nfinit(F); ab = splitgen(nf, b, g, eps); al = ab[1]; be = ab[2]")
    gp("B = bnfinit(nf, 1); ap = aprime(B)")
    facs = ints(gp("ap[1]"))
    k = len(facs)
    actions = []
    if m == 2:
        gp("s = lift(Mod(eps * (al + be^4), F))")
        actions.append(("gamma", mat_rows(gp("actmat(B, ap, s)"), k, k)))
    gp(f"s = lift(Mod(eps * (al + be^{q - 1}), F))")
    actions.append(("delta", mat_rows(gp("actmat(B, ap, s)"), k, k)))
    slug = ("m%d" % -d) if d < 0 else ("p%d" % d)
    label = "%s(zeta%d)" % (label_quadratic(d), q)
    write_record(outdir, "k_%s_zeta%d.wtrec" % (slug, q), label, gp("F"), facs, actions, None, PROV)
    print(label, facs, actions, flush=True)


def main():
    outdir = sys.argv[1]
    quick = "--quick" in sys.argv
    os.makedirs(outdir, exist_ok=True)
    only = [a for a in sys.argv[2:] if not a.startswith("--")]
    jobs = {
        "towers": lambda: [tower(outdir, d, 2) for d in (-14, -239, 3739)],
        "towers1": lambda: [tower(outdir, d, 1 if quick else 2) for d in (-1409, -1658)],
        "k1": lambda: [cyclo(outdir, d, 2) for d in (4227, 4974)],
        "k": lambda: [cyclo(outdir, d, 1) for d in (6, 15, 33, 42, 69, 105, 717, 4227, -21, -11217)],
    }
    for name in only or list(jobs):
        jobs[name]()


if __name__ == "__main__":
    main()
