"""Command-line front end: model loading, analysis pipelines and JSON reports."""
import argparse
import json
import math
import sys
from dataclasses import replace
from importlib import resources

import jsonschema
import numpy as np

from . import __version__
from .cartan import (
    SearchFailure,
    PreconditionError,
    conjugacy_test,
    enumerate_classes,
    random_regular_real,
)
from .cayley import (
    NotApplicableError,
    cayley_transform,
    extremal_search,
    restricted_polar_check,
)
from .isopgeom import (
    fd_check,
    isoparametric_verdict,
    orbit_closure_probe,
    orbit_frame,
    spectrum_vs_roots,
)
from .liealg import LieAlgebraError, make_algebra
from .numkernel import DEFAULT_POLICY, InvalidInputError
from .roots import compute_roots, orthogonality_residuals
from .sympair import (
    REP_CATALOG,
    NotFoundError,
    PairValidationError,
    build_pair,
    catalog_pair,
    catalog_representation,
    combined_decomposition,
    conjugated_cartan_pair,
    construct_cartan_pair,
    isotropy_representation,
)

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_SCHEMA, EXIT_VALIDATION = 0, 1, 2, 3, 4
REPORT_VERSION = "1"
STAGES = ("classes", "roots", "cayley", "extremal", "isoparametric", "cartan-pairs", "probe")
CHECK_TOLERANCES = {
    "pair validation": 1e-9,
    "orthogonality": 1e-8,
    "cayley": 1e-9,
    "restricted polar": 1e-8,
    "weingarten vs roots": 1e-6,
    "finite differences": 1e-6,
    "cartan pair": 1e-9,
}


class ModelError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


# ------------------------------------------------------------- serialization

def _num(x):
    x = float(x)
    if not math.isfinite(x):
        return None
    x = float(f"{x:.12g}")
    return 0.0 if x == 0 else x


def to_json(obj):
    """Plain JSON data: complex numbers as [re, im], matrices row-major, floats to 12 digits."""
    if isinstance(obj, dict):
        return {str(k): to_json(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_json(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if obj.dtype.kind != "c":
            return to_json(obj.tolist())
        return [to_json(row) for row in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [_num(obj.real), _num(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    return obj


def dumps(report):
    return json.dumps(to_json(report), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def load_schema(name):
    return json.loads(resources.files("polarrep").joinpath("schemas", name).read_text())


# ------------------------------------------------------------------ loading

def parse_builtin(text):
    """'name' or 'name:k=v,k=v' -> (name, params)."""
    name, _, rest = text.partition(":")
    params = {}
    if rest:
        for item in rest.split(","):
            key, eq, val = item.partition("=")
            if not eq or not key:
                raise ModelError(EXIT_PARSE, f"malformed builtin parameter {item!r} (expected k=v)")
            try:
                params[key.strip()] = float(val) if "." in val else int(val)
            except ValueError:
                raise ModelError(EXIT_PARSE, f"parameter {key} is not a number: {val!r}") from None
    return name.strip(), params


def _scalar(x):
    return complex(x[0], x[1]) if isinstance(x, list) else complex(x)


def _matrix(rows):
    m = np.array([[_scalar(x) for x in row] for row in rows], dtype=complex)
    return m.real if np.allclose(m.imag, 0) else m


def model_from_document(doc, pol=DEFAULT_POLICY):
    """Validated symmetric pair from a parsed model document."""
    try:
        jsonschema.validate(doc, load_schema("model.schema.json"))
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ModelError(EXIT_SCHEMA, f"schema error at {where}: {exc.message}") from None
    n = len(doc["basis"])
    c = np.zeros((n, n, n))
    given = set()
    for i, j, k, val in doc["structure_constants"]:
        if max(i, j, k) >= n:
            raise ModelError(EXIT_SCHEMA, f"structure constant index out of range: {[i, j, k]}")
        c[i, j, k] = val
        given.add((i, j, k))
    for i, j, k in list(given):
        if (j, i, k) not in given:
            c[j, i, k] = -c[i, j, k]
    try:
        mats = [_matrix(m) for m in doc["matrix_realization"]] if "matrix_realization" in doc else None
        alg = make_algebra(doc["basis"], c, mats)
        inv = doc["involutions"]
        return build_pair(alg, _matrix(inv["tau"]), _matrix(inv["sigma"]), _matrix(inv["theta"]), pol,
                          name=doc.get("name", "custom"))
    except (LieAlgebraError, PairValidationError) as exc:
        raise ModelError(EXIT_VALIDATION, str(exc)) from None
    except (InvalidInputError, ValueError) as exc:
        raise ModelError(EXIT_VALIDATION, f"invalid model: {exc}") from None


def load_model(args):
    """(pair or None, representation, source description, document tolerances, seed)."""
    if bool(args.builtin) == bool(args.model):
        raise ModelError(EXIT_PARSE, "give exactly one of --builtin or --model")
    if args.builtin:
        name, params = parse_builtin(args.builtin)
        try:
            if name in REP_CATALOG:
                return None, catalog_representation(name, params), {"builtin": args.builtin}, {}, None
            pair = catalog_pair(name, params)
        except NotFoundError as exc:
            raise ModelError(EXIT_PARSE, exc.args[0]) from None
        except (InvalidInputError, TypeError) as exc:
            raise ModelError(EXIT_SCHEMA, str(exc)) from None
        return pair, isotropy_representation(pair), {"builtin": args.builtin}, {}, None
    try:
        with open(args.model, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ModelError(EXIT_PARSE, f"cannot read model file: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(EXIT_PARSE, f"JSON parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") \
            from None
    pair = model_from_document(doc)
    try:
        rep = isotropy_representation(pair)
    except (PairValidationError, ValueError) as exc:
        raise ModelError(EXIT_VALIDATION, str(exc)) from None
    return pair, rep, {"model": args.model}, doc.get("tolerances", {}), doc.get("seed")


# ----------------------------------------------------------------- analysis

def stage_seeds(seed):
    """Independent per-stage seeds split from one seed."""
    children = np.random.SeedSequence(seed).spawn(len(STAGES))
    return {name: int(ch.generate_state(1)[0]) for name, ch in zip(STAGES, children)}


class Analysis:
    """Collects report sections, checks and stage errors."""

    def __init__(self, pair, rep, pol, seed, source, budget, samples):
        self.pair, self.rep, self.pol, self.seed = pair, rep, pol, seed
        self.seeds = stage_seeds(seed)
        self.budget, self.samples = budget, samples
        self.report = {"provenance": {
            "seed": seed, "version": __version__, "report_version": REPORT_VERSION, "source": source,
            "tolerances": {"rank_tol": pol.rank_tol, "eig_tol": pol.eig_tol, "flow_tol": pol.flow_tol},
            "budget": budget, "samples": samples,
        }, "checks": {}, "errors": [], "incomplete": False}
        self.table = None
        self.root_reports = []

    def check(self, name, value, kind=None):
        tol = CHECK_TOLERANCES[kind or name]
        ok = value is not None and math.isfinite(value) and value <= tol
        self.report["checks"][name] = {"value": value, "tolerance": tol, "pass": bool(ok)}

    def run(self, stage, fn):
        try:
            fn()
        except (SearchFailure, PreconditionError, NotApplicableError, ValueError, np.linalg.LinAlgError) as exc:
            self.report["errors"].append({"stage": stage, "message": f"{type(exc).__name__}: {exc}"})
            self.report["incomplete"] = True

    # -- sections
    def pair_section(self):
        rep, pair = self.rep, self.pair
        out = {"name": rep.name, "dim_g": rep.dim_g, "dim_v": rep.dim_v,
               "representation_residual": max(rep.residuals.values(), default=0.0)}
        if pair is not None:
            dec = combined_decomposition(pair, self.pol)
            out.update({"params": pair.params, "dim_ambient": pair.ambient.dim,
                        "pair_residual": max(pair.residuals.values(), default=0.0),
                        "combined_dims": {"k_R": dec.dims[0], "p_R": dec.dims[1],
                                          "V_R∩W": dec.dims[2], "V_R∩iW": dec.dims[3]},
                        "notes": list(pair.warnings)})
            self.check("pair validation", out["pair_residual"])
        self.check("representation validation", out["representation_residual"], "pair validation")
        self.report["pair"] = out

    def classes(self):
        t = enumerate_classes(self.rep, self.budget, self.seeds["classes"], self.pol)
        self.table = t
        self.report["cartan_classes"] = {
            "count": len(t.representatives),
            "signatures": [list(s) for s in t.signatures],
            "root_types": t.root_types,
            "sample_counts": t.sample_counts,
            "incomplete": t.incomplete,
            "representatives": [r.basis for r in t.representatives],
        }
        if t.incomplete:
            self.report["incomplete"] = True

    def roots(self):
        out = []
        worst = 0.0
        for i, c in enumerate(self.table.representatives):
            rs = compute_roots(self.rep, c, self.pol, seed=self.seeds["roots"])
            self.root_reports.append(rs)
            orth = orthogonality_residuals(self.rep, c, rs)
            worst = max(worst, orth["<c, g.c>"], orth["<g_a.c, g_b.c>"], abs(orth["dim deficit"]))
            out.append({
                "class": i,
                "roots": [{"type": d.type, "subtype": d.subtype, "multiplicity": d.multiplicity,
                           "coroot": d.coroot, "functional": d.functional} for d in rs.roots],
                "sigma_action": [list(s) for s in rs.sigma_action],
                "orthogonality": orth,
                "flags": rs.flags,
            })
        self.report["roots"] = out
        self.check("orthogonality", worst)

    def _class_of(self, c):
        for j, other in enumerate(self.table.representatives):
            if conjugacy_test(self.rep, c, other, self.pol, seed=self.seeds["cayley"]).result:
                return j
        return None

    def cayley(self):
        out = []
        worst = 0.0
        kinds = {("imaginary", "noncompact"): "noncompact-imaginary", ("real", "compact"): "compact-real"}
        for i, c in enumerate(self.table.representatives):
            for k, d in enumerate(self.root_reports[i].roots):
                kind = kinds.get((d.type, d.subtype))
                if kind is None:
                    continue
                rec = cayley_transform(self.rep, c, d, kind, self.pol)
                worst = max([worst] + [abs(v) for v in rec.residuals.values()])
                out.append({"from_class": i, "root": k, "kind": kind, "to_class": self._class_of(rec.target),
                            "target_signature": list(rec.target.signature), "generator": rec.generator,
                            "operator": rec.operator, "residuals": rec.residuals, "note": rec.note})
        self.report["cayley"] = out
        self.check("cayley", worst)

    def extremal(self):
        seed_c = self.table.representatives[0]
        out = {}
        worst = 0.0
        for direction, dual in (("max-noncompact", False), ("max-compact", True)):
            c = extremal_search(self.rep, direction, seed_c, self.pol)
            chk = restricted_polar_check(self.rep, c, dual=dual, pol=self.pol, seed=self.seeds["extremal"])
            out[direction] = {"signature": list(c.signature), "class": self._class_of(c),
                              "restricted_polar": {"passed": chk.passed, "dims": chk.dims,
                                                   "residuals": chk.residuals,
                                                   "counterexample": chk.counterexample,
                                                   "vacuous": chk.vacuous}}
            worst = max([worst] + list(chk.residuals.values()))
            if not chk.passed:
                worst = max(worst, 1.0)
        self.report["extremal"] = out
        self.check("restricted polar", worst)

    def isoparametric(self):
        rng = np.random.default_rng(self.seeds["isoparametric"])
        out = []
        spec_worst, fd_worst = 0.0, 0.0
        for k in range(self.samples):
            v = random_regular_real(self.rep, rng, self.pol)
            r = isoparametric_verdict(self.rep, v, self.pol, seed=k)
            entry = {"base_point": v, "metric_signature": list(r.metric_signature),
                     "weingarten_spectra": r.weingarten_spectra, "normal_flat": r.normal_flat,
                     "flat_residual": r.flat_residual, "verdict": r.verdict, "samples": r.samples,
                     "residuals": r.residuals, "notes": r.notes}
            if self.pair is not None and r.verdict != "degenerate-metric":
                frame = orbit_frame(self.rep, v, self.pol)
                xi = frame.normal @ rng.standard_normal(frame.normal.shape[1])
                entry["root_prediction_mismatch"] = spectrum_vs_roots(self.rep, v, xi, self.pol, seed=k)
                spec_worst = max(spec_worst, entry["root_prediction_mismatch"])
            entry["finite_difference_error"] = fd_check(self.rep, v, 10, seed=k, pol=self.pol)
            fd_worst = max(fd_worst, entry["finite_difference_error"])
            out.append(entry)
        self.report["isoparametric"] = out
        if self.pair is not None:
            self.check("weingarten vs roots", spec_worst)
        self.check("finite differences", fd_worst)

    def cartan_pairs(self):
        rng = np.random.default_rng(self.seeds["cartan-pairs"])
        worst = 0.0
        gr = self.rep.real_g_basis()
        for _ in range(3):
            y = gr @ rng.standard_normal(gr.shape[1]) + 1j * (gr @ rng.standard_normal(gr.shape[1]))
            y = 0.5 * y / max(np.linalg.norm(self.rep.act(y), 2), 1e-300)
            mu, mu_t = conjugated_cartan_pair(self.rep, y)
            res = construct_cartan_pair(self.rep, mu, mu_t, self.pol).residuals
            worst = max([worst] + [v for k, v in res.items() if k != "min positivity"])
            if res["min positivity"] <= 0:
                worst = max(worst, 1.0)
        self.check("cartan pair", worst)


def analyze(pair, rep, pol, seed, source, budget=200, samples=5, stages=None):
    a = Analysis(pair, rep, pol, seed, source, budget, samples)
    a.pair_section()
    wanted = stages or ("classes", "roots", "cayley", "extremal", "isoparametric", "cartan-pairs")
    needs_pair = {"classes", "roots", "cayley", "extremal", "cartan-pairs"}
    for stage in wanted:
        if stage in needs_pair and rep.g_theta is None:
            a.report["errors"].append({"stage": stage, "message": "skipped: no Cartan involution on g"})
            a.report["incomplete"] = True
            continue
        if stage in ("roots", "cayley", "extremal") and a.table is None:
            continue
        if stage == "cayley" and len(a.root_reports) != len(a.table.representatives):
            continue
        a.run(stage, getattr(a, stage.replace("-", "_")))
    return a.report


# ---------------------------------------------------------------------- CLI

def build_parser():
    p = argparse.ArgumentParser(prog="polarrep", description="Polar representations of symmetric pairs.")
    sub = p.add_subparsers(dest="verb", required=True)
    verbs = {
        "validate": "check a model and print its summary",
        "analyze": "full analysis report",
        "roots": "Cartan classes and their roots",
        "cayley": "Cartan classes, roots, Cayley transforms and extremal subspaces",
        "isoparam": "isoparametric verdicts at sampled regular points",
        "probe-closures": "compare orbit dimensions with a subrepresentation",
    }
    for verb, help_text in verbs.items():
        s = sub.add_parser(verb, help=help_text)
        s.add_argument("--builtin", help="builtin model, e.g. sl2-adjoint or supq:p=1,q=1")
        s.add_argument("--model", help="path of a JSON model file")
        s.add_argument("--seed", type=int, default=None, help="seed for randomized stages")
        s.add_argument("--out", help="write the report here (default stdout)")
        s.add_argument("--tol-rank", type=float, help="relative rank tolerance")
        s.add_argument("--tol-eig", type=float, help="eigenvalue tolerance")
        s.add_argument("--checks-only", action="store_true",
                       help="print only the invariant checks; exit 1 if any fails")
        s.add_argument("--strict", action="store_true", help="exit 1 if any stage failed")
        s.add_argument("--budget", type=int, default=200, help="regular samples for class enumeration")
        s.add_argument("--samples", type=int, default=5, help="orbit points for the isoparametric test")
        if verb == "probe-closures":
            s.add_argument("--sub", required=True, help="builtin subrepresentation on the same space")
    return p


def _policy(args, doc_tol):
    kw = dict(doc_tol)
    if args.tol_rank is not None:
        kw["rank_tol"] = args.tol_rank
    if args.tol_eig is not None:
        kw["eig_tol"] = args.tol_eig
    try:
        return replace(DEFAULT_POLICY, **kw)
    except InvalidInputError as exc:
        raise ModelError(EXIT_SCHEMA, str(exc)) from None


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _failed_checks(report):
    return [k for k, v in report.get("checks", {}).items() if not v["pass"]]


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        pair, rep, source, doc_tol, doc_seed = load_model(args)
        pol = _policy(args, doc_tol)
    except ModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    seed = args.seed if args.seed is not None else (doc_seed if doc_seed is not None else 0)
    if args.verb == "validate":
        report = {"provenance": {"source": source, "version": __version__}, "checks": {}, "errors": [],
                  "incomplete": False}
        a = Analysis(pair, rep, pol, seed, source, 0, 0)
        a.pair_section()
        report.update({"pair": a.report["pair"], "checks": a.report["checks"]})
        if pair is not None:
            report["pair"]["residuals"] = pair.residuals
        report["pair"]["representation_residuals"] = rep.residuals
    elif args.verb == "probe-closures":
        try:
            name, params = parse_builtin(args.sub)
            sub_rep = catalog_representation(name, params)
        except (ModelError, NotFoundError, InvalidInputError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_PARSE
        rng = np.random.default_rng(stage_seeds(seed)["probe"])
        pts = [rep.real_v_basis() @ rng.standard_normal(rep.real_v_basis().shape[1])
               for _ in range(args.samples)]
        report = {"provenance": {"source": source, "sub": args.sub, "seed": seed, "version": __version__},
                  "checks": {}, "errors": [], "incomplete": False}
        try:
            probe = orbit_closure_probe(rep, sub_rep, pts, pol)
            report["probe"] = {"samples": probe.samples, "all_equal": probe.all_equal,
                               "direction": probe.direction}
            if any("error" in s for s in probe.samples):
                report["incomplete"] = True
        except (InvalidInputError, ValueError) as exc:
            report["errors"].append({"stage": "probe", "message": str(exc)})
            report["incomplete"] = True
    else:
        stages = {
            "analyze": None,
            "roots": ("classes", "roots"),
            "cayley": ("classes", "roots", "cayley", "extremal"),
            "isoparam": ("isoparametric",),
        }[args.verb]
        report = analyze(pair, rep, pol, seed, source, args.budget, args.samples, stages)
    if args.checks_only:
        report = {k: report[k] for k in ("checks", "provenance", "errors", "incomplete") if k in report}
    jsonschema.validate(to_json(report), load_schema("report.schema.json"))
    _emit(dumps(report), args.out)
    if args.checks_only and (_failed_checks(report) or report["incomplete"]):
        return EXIT_FAIL
    if args.strict and (report["errors"] or report["incomplete"]):
        return EXIT_FAIL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
