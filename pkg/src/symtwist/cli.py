"""Command-line front end and the JSON file formats.

Exit codes: 0 success, 1 verification failure, 2 malformed input,
3 capacity exceeded.  Results go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from . import abcoh, witt
from .errors import CapacityError, MalformedInputError, NotInvertibleError, VerificationError
from .exactbase import BaseRing, make_field
from .quasihopf import (
    QuasiHopfDatum,
    TwistCertificate,
    check_axioms,
    constructors,
    jacobson_radical,
)
from .tensorops import cochain_cohomology

FORMAT_VERSION = 1
SHIPPED = {
    "category_D": lambda: constructors("category_D"),
    "alpha2": lambda: constructors("alpha2"),
    "group_algebra_Z2": lambda: constructors("group_algebra", (2,)),
    "function_algebra_Z2": lambda: constructors("function_algebra", (2,)),
    "divided_power_2": lambda: constructors("divided_power", 2),
    "alpha2_pair": lambda: constructors("alpha2_pair"),
    "deformed_D_h2": lambda: constructors("deformed_D", 2),
}


# -- serialization --------------------------------------------------------------

def _dump_line(key, value):
    return f'  "{key}": ' + json.dumps(value, separators=(",", ":"), ensure_ascii=False)


def _canonical(pairs):
    return "{\n" + ",\n".join(_dump_line(k, v) for k, v in pairs) + "\n}\n"


def _ring_from_json(obj) -> BaseRing:
    if not isinstance(obj, dict):
        raise MalformedInputError("field 'ring' must be an object")
    try:
        p, m = int(obj["p"]), int(obj.get("m", 1))
        modulus = obj.get("modulus")
        h = int(obj.get("h_trunc", 1))
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInputError(f"field 'ring' is incomplete: {exc}") from None
    if p < 2 or any(p % q == 0 for q in range(2, int(p ** 0.5) + 1)):
        raise MalformedInputError(f"field 'ring.p' = {p} is not prime")
    if m < 1 or h < 1:
        raise MalformedInputError("fields 'ring.m' and 'ring.h_trunc' must be >= 1")
    return BaseRing(make_field(p, m, modulus), h)


def _array(obj, name, shape):
    try:
        arr = np.asarray(obj, dtype=np.int64)
    except (TypeError, ValueError):
        raise MalformedInputError(f"field '{name}' is not an integer array") from None
    if arr.shape != shape:
        raise MalformedInputError(f"field '{name}' has shape {arr.shape}, expected {shape}")
    return arr


def _check_range(arr, name, p):
    if arr.size and (arr.min() < 0 or arr.max() >= p):
        raise MalformedInputError(f"field '{name}' has coordinates outside 0..{p - 1}")
    return arr


@dataclass
class AlgebraFile:
    """The on-disk form of a :class:`QuasiHopfDatum`.

    Ring elements are lists of ``D`` F_p-coordinates.  ``mul[a][b]`` and
    ``delta[a]`` (flattened to ``dim**2`` entries, first leg slowest) are lists
    of ring elements; ``phi`` and ``r`` are flattened the same way and may be
    omitted when they are the identity.
    """

    datum: QuasiHopfDatum

    KEYS = ("format_version", "ring", "dim", "basis_names", "mul", "unit", "counit",
            "delta", "phi", "r")

    @classmethod
    def loads(cls, text: str, name: str = "") -> "AlgebraFile":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MalformedInputError(f"not valid JSON: {exc}") from None
        if not isinstance(obj, dict):
            raise MalformedInputError("algebra file must be a JSON object")
        unknown = set(obj) - set(cls.KEYS)
        if unknown:
            raise MalformedInputError(f"unknown field(s): {', '.join(sorted(unknown))}")
        if obj.get("format_version") != FORMAT_VERSION:
            raise MalformedInputError(
                f"field 'format_version' must be {FORMAT_VERSION}, got {obj.get('format_version')!r}")
        for key in ("ring", "dim", "mul", "unit", "counit", "delta"):
            if key not in obj:
                raise MalformedInputError(f"missing field '{key}'")
        ring = _ring_from_json(obj["ring"])
        dim = obj["dim"]
        if not isinstance(dim, int) or dim < 1:
            raise MalformedInputError("field 'dim' must be a positive integer")
        D = ring.D
        get = lambda key, shape: _check_range(_array(obj[key], key, shape), key, ring.p)
        mul = get("mul", (dim, dim, dim, D))
        unit = get("unit", (dim, D))
        counit = get("counit", (dim, D))
        delta = get("delta", (dim, dim * dim, D)).reshape(dim, dim, dim, D)
        phi = get("phi", (dim ** 3, D)).reshape((dim,) * 3 + (D,)) if "phi" in obj else None
        R = get("r", (dim ** 2, D)).reshape(dim, dim, D) if "r" in obj else None
        names = obj.get("basis_names")
        if names is not None and (not isinstance(names, list)
                                  or not all(isinstance(s, str) for s in names)):
            raise MalformedInputError("field 'basis_names' must be a list of strings")
        return cls(QuasiHopfDatum(ring, mul, unit, delta, counit, phi, R, names, name))

    @classmethod
    def load(cls, path) -> "AlgebraFile":
        path = Path(path)
        return cls.loads(_read(path), path.stem)

    def dumps(self) -> str:
        Dm = self.datum
        ring, dim = Dm.ring, Dm.dim
        k = Dm.kernel
        pairs = [
            ("format_version", FORMAT_VERSION),
            ("ring", ring.to_dict()),
            ("dim", dim),
            ("basis_names", list(Dm.basis_names)),
            ("mul", Dm.mul.tolist()),
            ("unit", Dm.unit.tolist()),
            ("counit", Dm.counit.tolist()),
            ("delta", Dm.delta.reshape(dim, dim * dim, ring.D).tolist()),
        ]
        if not np.array_equal(Dm.phi, k.one(3)):
            pairs.append(("phi", Dm.phi.reshape(-1, ring.D).tolist()))
        if not np.array_equal(Dm.R, k.one(2)):
            pairs.append(("r", Dm.R.reshape(-1, ring.D).tolist()))
        return _canonical(pairs)

    def save(self, path):
        Path(path).write_text(self.dumps(), encoding="utf-8")


def _read(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as exc:
        raise MalformedInputError(f"cannot read {path}: {exc.strerror}") from None


def certificate_dumps(cert: TwistCertificate, ring: BaseRing, dim: int, d=None) -> str:
    entries = [{"kind": kind, "tensor": np.asarray(J).reshape(-1, ring.D).tolist()}
               for kind, J in cert.entries]
    pairs = [("format_version", FORMAT_VERSION), ("ring", ring.to_dict()), ("dim", dim)]
    if d is not None:
        pairs.append(("d", np.asarray(d).tolist()))
    pairs.append(("entries", entries))
    return _canonical(pairs)


def certificate_loads(text: str, datum: QuasiHopfDatum) -> TwistCertificate:
    """Read a certificate (or a single twist with a ``tensor`` field) for ``datum``."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"not valid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise MalformedInputError("certificate must be a JSON object")
    if obj.get("format_version") != FORMAT_VERSION:
        raise MalformedInputError(f"field 'format_version' must be {FORMAT_VERSION}")
    if "ring" in obj and _ring_from_json(obj["ring"]) != datum.ring:
        raise MalformedInputError("field 'ring' does not match the algebra")
    if obj.get("dim", datum.dim) != datum.dim:
        raise MalformedInputError("field 'dim' does not match the algebra")
    if "entries" in obj:
        raw = obj["entries"]
        if not isinstance(raw, list):
            raise MalformedInputError("field 'entries' must be a list")
    elif "tensor" in obj:
        raw = [{"kind": obj.get("kind", "pseudotwist"), "tensor": obj["tensor"]}]
    else:
        raise MalformedInputError("missing field 'entries' (or 'tensor')")
    cert = TwistCertificate()
    shape = (datum.dim ** 2, datum.ring.D)
    for i, entry in enumerate(raw):
        if not isinstance(entry, dict) or "tensor" not in entry:
            raise MalformedInputError(f"entry {i} has no field 'tensor'")
        kind = entry.get("kind", "pseudotwist")
        if kind not in ("twist", "pseudotwist"):
            raise MalformedInputError(f"entry {i}: field 'kind' must be twist or pseudotwist")
        J = _check_range(_array(entry["tensor"], f"entries[{i}].tensor", shape),
                         f"entries[{i}].tensor", datum.ring.p)
        cert.add(J.reshape(datum.dim, datum.dim, datum.ring.D), kind)
    return cert


def shipped_example(name: str) -> str:
    """Text of a shipped example algebra file."""
    if name not in SHIPPED:
        raise MalformedInputError(f"unknown example {name!r}; choose from {', '.join(SHIPPED)}")
    return resources.files("symtwist").joinpath("data", f"{name}.json").read_text(encoding="utf-8")


# -- argument helpers ------------------------------------------------------------------

def field_from_q(q: int):
    if q < 2:
        raise MalformedInputError(f"--q {q} is not a prime power")
    p = next(c for c in range(2, q + 1) if q % c == 0)
    m, r = 0, q
    while r % p == 0:
        r //= p
        m += 1
    if r != 1:
        raise MalformedInputError(f"--q {q} is not a prime power")
    return make_field(p, m)


def parse_group(text: str, p: int) -> abcoh.AbelianPGroup:
    try:
        orders = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise MalformedInputError(f"--group {text!r} must be comma-separated orders") from None
    return abcoh.AbelianPGroup.from_orders(p, orders)


# -- subcommands ----------------------------------------------------------------------

def _out(line=""):
    print(line)


def cmd_witt_tables(a):
    field = field_from_q(a.q)
    if field.p != a.p:
        raise MalformedInputError(f"--q {a.q} is not a power of --p {a.p}")
    ctx = witt.witt_structure_polynomials(a.p, a.n)
    _out(f"W_{a.n}(F_{a.q}), p = {a.p}")
    for label, polys in (("S", ctx.sum_polys), ("P", ctx.prod_polys), ("N", ctx.neg_polys)):
        for k, poly in enumerate(polys):
            _out(f"{label}_{k} = {ctx.format_poly(poly)}")
    if a.elements:
        X = witt.all_coordinates(ctx, field)
        names = ["(" + ",".join(field.format(c) for c in row) + ")" for row in X]
        n = len(X)
        for label, fn in (("+", witt.batch_add), ("*", witt.batch_mul)):
            left = np.repeat(X, n, axis=0)
            right = np.tile(X, (n, 1))
            res = fn(ctx, field, left, right)
            _out(f"table {label}")
            for i in range(n):
                row = res[i * n:(i + 1) * n]
                _out(names[i] + ": " + " ".join(
                    "(" + ",".join(field.format(c) for c in r) + ")" for r in row))
    return 0


def cmd_witt_coker(a):
    field = field_from_q(a.q)
    if field.p != a.p:
        raise MalformedInputError(f"--q {a.q} is not a power of --p {a.p}")
    ctx = witt.witt_structure_polynomials(a.p, a.n)
    coker = witt.coker_P(ctx, field)
    ker = witt.ker_P(ctx, field)
    _out(f"coker P on W_{a.n}(F_{a.q}): {abcoh.format_factors(coker.invariant_factors)}")
    _out(f"ker P on W_{a.n}(F_{a.q}): {abcoh.format_factors(ker.invariant_factors)}")
    return 0


def cmd_witt_doubling(a):
    field = field_from_q(a.q)
    ok, bad = witt.doubling_identity_check(field)
    _out(f"2*(x0,x1) = (0,x0^2) on W_2(F_{a.q}): {'holds' if ok else 'FAILS'}")
    for x in bad[:10]:
        print(f"counterexample: {x}", file=sys.stderr)
    return 0 if ok else 1


def cmd_h2inv(a):
    field = field_from_q(a.q)
    A = parse_group(a.group, field.p)
    formula = abcoh.h2_inv_formula(A, field)
    _out(str(formula))
    _out("provenance: formula (Witt cokernel)")
    if a.brute_force:
        brute = abcoh.twist_classes_bruteforce(A, field).group
        agree = brute == formula
        _out(f"brute force (twist enumeration): {brute}")
        _out(f"agreement: {'yes' if agree else 'NO'}")
        return 0 if agree else 1
    return 0


def cmd_sweedler(a):
    field = field_from_q(a.q)
    A = parse_group(a.group, field.p)
    formula = abcoh.sweedler_dims_formula(A, field, a.max_degree)
    status = 0
    for i, g in enumerate(formula, start=1):
        line = f"H^{i} = {g}  [formula]"
        if a.brute_force:
            try:
                b = abcoh.sweedler_bruteforce(A, field, i).group
            except CapacityError as exc:
                line += f"  brute force skipped: {exc}"
            else:
                agree = b == g
                status = status or (0 if agree else 1)
                line += f"  brute force: {b} ({'agrees' if agree else 'DISAGREES'})"
        _out(line)
    return status


def cmd_torsor(a):
    field = field_from_q(a.q)
    A = parse_group(a.group, field.p)
    classes = abcoh.twist_classes_bruteforce(A, field)
    if not 0 <= a.class_index < classes.count:
        raise MalformedInputError(
            f"--class {a.class_index} out of range; there are {classes.count} classes")
    J = classes.representatives[a.class_index]
    degrees = abcoh.torsor_decompose(A, field, J)
    order = abcoh.class_order(A, field, J)
    _out(f"class {a.class_index} of {classes.count} (order {order})")
    _out(f"torsor factor degrees: {degrees}")
    return 0


def _load_datum(path):
    return AlgebraFile.load(path).datum


def cmd_hopf_check(a):
    D = _load_datum(a.file)
    report = check_axioms(D)
    for line in report.lines():
        _out(line)
    return 0 if report.ok else 1


def cmd_hopf_radical(a):
    D = _load_datum(a.file)
    filt = jacobson_radical(D)
    _out(f"dim Rad = {len(filt.radical)}")
    _out(f"nilpotency index = {filt.nilpotency_index}")
    _out("gr dims = " + " ".join(str(x) for x in filt.gr_dims))
    if filt.lifted_fp_dim is not None:
        _out(f"dim_Fp Rad over the base ring = {filt.lifted_fp_dim}")
    return 0


def cmd_hopf_cohomology(a):
    D = _load_datum(a.file)
    if a.degree < 0:
        raise MalformedInputError("--degree must be >= 0")
    res = cochain_cohomology(D.kernel, a.degree)
    _out(f"C^{a.degree} = {res.dim_cochains}  Z^{a.degree} = {res.dim_cocycles}  "
         f"B^{a.degree} = {res.dim_coboundaries}  H^{a.degree} = {res.dim}")
    for rep in res.representatives:
        _out("  " + D.format(rep))
    return 0


def cmd_hopf_twist(a):
    D = _load_datum(a.file)
    cert = certificate_loads(_read(Path(a.jfile)), D)
    try:
        out = cert.replay(D)
    except NotInvertibleError as exc:
        raise MalformedInputError(f"twist is not invertible: {exc}") from None
    AlgebraFile(out).save(a.output)
    return 0


def cmd_hopf_normalize(a):
    from .normalize import normalize

    D = _load_datum(a.file)
    res = normalize(D)
    AlgebraFile(res.final).save(a.output)
    if a.certificate:
        Path(a.certificate).write_text(
            certificate_dumps(res.certificate, D.ring, D.dim, res.d), encoding="utf-8")
    _out(f"d = {D.format(res.d)}")
    _out(f"twists = {len(res.certificate)}"
         + ("  (counit-normalized twist)" if res.is_twist else ""))
    return 0


def cmd_hopf_identify(a):
    from .normalize import identify_fpdim2

    _out(identify_fpdim2(_load_datum(a.file)))
    return 0


def cmd_hopf_replay(a):
    D = _load_datum(a.file)
    cert = certificate_loads(_read(Path(a.cert)), D)
    AlgebraFile(cert.replay(D)).save(a.output)
    return 0


def cmd_hopf_example(a):
    text = shipped_example(a.name)
    if a.output:
        Path(a.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="symtwist", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    w = sub.add_parser("witt", help="truncated Witt vectors").add_subparsers(
        dest="witt_command", required=True)
    t = w.add_parser("tables", help="structure polynomials (and element tables)")
    t.add_argument("--p", type=int, required=True)
    t.add_argument("--n", type=int, required=True)
    t.add_argument("--q", type=int, required=True)
    t.add_argument("--elements", action="store_true", help="also print full +/* tables")
    t.set_defaults(fn=cmd_witt_tables)
    c = w.add_parser("coker", help="cokernel and kernel of F - id")
    c.add_argument("--p", type=int, required=True)
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--q", type=int, required=True)
    c.set_defaults(fn=cmd_witt_coker)
    c = w.add_parser("check-doubling", help="2(x0,x1) = (0,x0^2) in W_2(F_q)")
    c.add_argument("--q", type=int, required=True)
    c.set_defaults(fn=cmd_witt_doubling)

    h = sub.add_parser("h2inv", help="twist classes of F_q[A]")
    h.add_argument("--group", required=True, help="cyclic orders, e.g. 2,4")
    h.add_argument("--q", type=int, required=True)
    h.add_argument("--brute-force", action="store_true")
    h.set_defaults(fn=cmd_h2inv)

    s = sub.add_parser("sweedler", help="Sweedler cohomology of the function algebra of A")
    s.add_argument("--group", required=True)
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--max-degree", type=int, default=4)
    s.add_argument("--brute-force", action="store_true")
    s.set_defaults(fn=cmd_sweedler)

    t = sub.add_parser("torsor", help="torsor of a twist class")
    t.add_argument("--group", required=True)
    t.add_argument("--q", type=int, required=True)
    t.add_argument("--class", dest="class_index", type=int, required=True)
    t.set_defaults(fn=cmd_torsor)

    hp = sub.add_parser("hopf", help="quasi-Hopf data files").add_subparsers(
        dest="hopf_command", required=True)
    x = hp.add_parser("check", help="verify all axioms")
    x.add_argument("file")
    x.set_defaults(fn=cmd_hopf_check)
    x = hp.add_parser("radical", help="Jacobson radical filtration")
    x.add_argument("file")
    x.set_defaults(fn=cmd_hopf_radical)
    x = hp.add_parser("cohomology", help="normalized cobar cohomology")
    x.add_argument("file")
    x.add_argument("--degree", type=int, required=True)
    x.set_defaults(fn=cmd_hopf_cohomology)
    x = hp.add_parser("twist", help="apply a (pseudo)twist")
    x.add_argument("file")
    x.add_argument("jfile")
    x.add_argument("-o", "--output", required=True)
    x.set_defaults(fn=cmd_hopf_twist)
    x = hp.add_parser("normalize", help="twist to Phi = 1, R = 1 + d⊗d")
    x.add_argument("file")
    x.add_argument("-o", "--output", required=True)
    x.add_argument("--certificate")
    x.set_defaults(fn=cmd_hopf_normalize)
    x = hp.add_parser("identify", help="classify a 2-dimensional datum")
    x.add_argument("file")
    x.set_defaults(fn=cmd_hopf_identify)
    x = hp.add_parser("replay", help="replay a certificate")
    x.add_argument("file")
    x.add_argument("cert")
    x.add_argument("-o", "--output", required=True)
    x.set_defaults(fn=cmd_hopf_replay)
    x = hp.add_parser("example", help="print a shipped example file")
    x.add_argument("name", choices=sorted(SHIPPED))
    x.add_argument("-o", "--output")
    x.set_defaults(fn=cmd_hopf_example)
    return ap


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except VerificationError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 1
    except NotInvertibleError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 1
    except MalformedInputError as exc:
        print(f"malformed input: {exc}", file=sys.stderr)
        return 2
    except CapacityError as exc:
        print(f"capacity exceeded: {exc}", file=sys.stderr)
        return 3


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
