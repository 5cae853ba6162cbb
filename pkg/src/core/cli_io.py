"""Command layer: JSON schemas, document loading, the five commands and report writing.

Every command returns (exit_code, report). Exit codes: 0 pass, 1 failed verdict, axiom
violation or failed precondition, 2 unreadable or schema-invalid input, unknown fixture or
missing witness. Reports are canonical JSON (sorted keys) and carry a RunManifest with
sha256 digests of the inputs, so equal inputs give byte-identical reports.
"""
import json
import logging
from pathlib import Path

import jsonschema
import numpy as np

from .comparison import ComparisonFunction, default_grid, validate_comparison
from .conditions import (
    ANCHORS, check_B, check_DS, check_equicontinuity, check_equinormed, check_L, check_LDS, check_lambda,
    check_uniform_local_flatness, equinormed_sup_bound, pair_quotient_oscillation,
)
from .errors import InvalidMatrix, LipcertError, MissingWitness, PostconditionFailed, SchemaError, UnknownFixture
from .family import difference_family, family_net, make_family
from .fixtures import build_fixture, random_family, verify_fixture
from .metric_core import space_from_vectors, validate_metric
from .oracle import covering_profile, exact_min_oscillation
from .output_generator import OutputGenerator
from .synthesis import (
    L_from_lambda, ds_cover_from_equicontinuity, equicontinuity_from_ds, equinorm_witness_from_B,
    flatness_from_net, lambda_boundedness, lambda_from_flatness, lambda_from_L, synthesize_B_cover,
    synthesize_DS_from_B, synthesize_tilde_cover,
)
from .utils import NORM_KINDS, Utils

try:
    from ..models.data_models import FAIL, PASS, Cover, LambdaWitness, RunManifest
except ImportError:
    from models.data_models import FAIL, PASS, Cover, LambdaWitness, RunManifest

SCHEMA_TAG = "lipcert/1"
TOOL_VERSION = "1.0.0"

CONDITIONS = ("equinormed", "B", "DS", "equicontinuity", "L", "LDS", "lambda", "flatness")
SYNTHESIS_KINDS = (
    "B", "DS", "equicontinuity-ds", "ds-equicontinuity", "equinorm", "equinormed-bound", "tilde",
    "lambda-from-L", "L-from-lambda", "lambda-from-flatness", "flatness", "lambda-bounds",
)

_NUMBER = {"type": "number"}
_MATRIX = {"type": "array", "items": {"type": "array", "items": _NUMBER}}
_TAG = {"const": SCHEMA_TAG}

_SPACE_BODY = {
    "type": "object",
    "properties": {
        "points": {"type": "integer", "minimum": 0},
        "dist": _MATRIX,
        "vectors": _MATRIX,
        "norm": {"enum": list(NORM_KINDS)},
        "labels": {"type": "array"},
    },
    "anyOf": [{"required": ["dist"]}, {"required": ["vectors"]}],
}

_PHI_BODY = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["power", "log1p", "pwl"]},
        "alpha": _NUMBER,
        "breakpoints": {"type": "array", "items": {"type": "array", "items": _NUMBER, "minItems": 2, "maxItems": 2}},
    },
    "required": ["kind"],
}

_COVER_BODY = {
    "type": "object",
    "properties": {
        "ambient": {"enum": ["points", "pairs"]},
        "parts": {"type": "array", "items": {"type": "array", "minItems": 1}},
    },
    "required": ["ambient", "parts"],
}

SCHEMAS = {
    "space": dict(_SPACE_BODY, properties=dict(_SPACE_BODY["properties"], schema=_TAG), required=["schema"]),
    "phi": dict(_PHI_BODY, properties=dict(_PHI_BODY["properties"], schema=_TAG), required=["schema", "kind"]),
    "family": {
        "type": "object",
        "properties": {
            "schema": _TAG,
            "domain": _SPACE_BODY,
            "members": {"type": "array", "minItems": 1, "items": {"type": "array"}},
            "norm": {"enum": list(NORM_KINDS)},
            "base": {"type": "integer", "minimum": 0},
            "phi": _PHI_BODY,
        },
        "required": ["schema", "domain", "members"],
    },
    "cover": dict(_COVER_BODY, properties=dict(_COVER_BODY["properties"], schema=_TAG),
                  required=["schema", "ambient", "parts"]),
    "witness": {
        "type": "object",
        "properties": {"schema": _TAG, "delta": _NUMBER, "n": _NUMBER, "cover": _COVER_BODY},
        "required": ["schema", "delta", "n", "cover"],
    },
}


def detect_kind(doc):
    """Decide which schema a document follows from its keys"""
    if "members" in doc:
        return "family"
    if "delta" in doc and "cover" in doc:
        return "witness"
    if "parts" in doc:
        return "cover"
    if "kind" in doc:
        return "phi"
    if "dist" in doc or "vectors" in doc:
        return "space"
    raise SchemaError("Unrecognized document (expected a space, phi, family, cover or witness)",
                      keys=sorted(doc) if isinstance(doc, dict) else [])


def load_document(path, kind=None):
    """
    Read and schema-validate one JSON document

    Args:
        path (str or Path): Input file
        kind (str, optional): Schema name; detected from the keys when omitted

    Returns:
        tuple: (kind, document, sha256 digest of the file bytes)
    """
    try:
        raw = Path(path).read_bytes()
        doc = json.loads(raw.decode("utf-8"))
    except (OSError, UnicodeDecodeError, ValueError) as e:
        raise SchemaError(f"Cannot read JSON from {path}: {e}", path=str(path)) from e
    kind = kind or detect_kind(doc)
    try:
        jsonschema.validate(instance=doc, schema=SCHEMAS[kind])
    except jsonschema.ValidationError as e:
        raise SchemaError(f"{path} is not a valid {kind} document: {e.message}",
                          path=str(path), location=[str(p) for p in e.absolute_path]) from e
    logging.debug(f"Loaded {kind} document from {path}")
    return kind, doc, Utils.content_digest(raw)


def tagged(doc):
    return dict(doc, schema=SCHEMA_TAG)


def space_from_dict(doc, tol):
    labels = tuple(doc.get("labels", ()))
    try:
        if "vectors" in doc:
            return space_from_vectors(doc["vectors"], doc.get("norm", "sup"), labels)
        return validate_metric(doc["dist"], tol, labels)
    except (InvalidMatrix, ValueError) as e:
        raise SchemaError(f"Space has an unusable shape: {e}", **getattr(e, "witness", {})) from e


def phi_from_dict(doc):
    return ComparisonFunction.from_dict(doc)


def family_from_dict(doc, tol):
    domain = space_from_dict(doc["domain"], tol)
    phi = phi_from_dict(doc["phi"]) if "phi" in doc else None
    try:
        return make_family(domain, doc["members"], doc.get("norm", "sup"), doc.get("base", 0), phi)
    except ValueError as e:
        raise SchemaError(f"Family members do not fit the domain: {e}") from e


def cover_from_dict(doc):
    try:
        return Cover(doc["ambient"], tuple(doc["parts"]))
    except (TypeError, ValueError) as e:
        raise SchemaError(f"Cover parts have the wrong shape: {e}") from e


def witness_from_dict(doc):
    return LambdaWitness(float(doc["delta"]), cover_from_dict(doc["cover"]), float(doc["n"]))


def write_report(report, out=None, indent=2):
    """Write canonical JSON to out, or print it when out is empty; returns the text"""
    text = Utils.canonical_json(report, indent) + "\n"
    if out:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        logging.info(f"Report written to {path}")
    else:
        print(text, end="")
    return text


def exit_code_for(error):
    if isinstance(error, (SchemaError, MissingWitness, UnknownFixture, ValueError, TypeError)):
        return 2
    return 1


class CommandRun:
    """Collects input digests and parameters of one command and assembles its report"""

    def __init__(self, command, settings, parameters):
        self.command = command
        self.settings = settings
        self.parameters = {k: v for k, v in sorted(parameters.items()) if v is not None}
        self.digests = {}

    @property
    def tol(self):
        return float(self.settings.get("tolerance", 1e-9))

    def load(self, role, path, kind=None):
        kind, doc, digest = load_document(path, kind)
        self.digests[role] = digest
        return kind, doc

    def family(self, path=None, random_spec=None):
        """Family from a JSON file or a seeded random instance "n,m,d" """
        if path:
            _, doc = self.load("family", path, "family")
            return family_from_dict(doc, self.tol)
        if random_spec:
            shape = self.settings.get("random_instance", {})
            n, m, d = _parse_shape(random_spec)
            rng = np.random.default_rng(int(self.settings.get("seed", 0)))
            A = random_family(rng, int(n), int(m), int(d), shape.get("norm", "sup"))
            self.digests["family"] = Utils.content_digest(Utils.canonical_json(A.to_dict()))
            logging.info(f"Random family: {n} points, {m} members, dimension {d}, seed {self.settings.get('seed', 0)}")
            return A
        raise MissingWitness("A family file or --random n,m,d is required", role="family")

    def phi(self, path=None, A=None):
        if path:
            _, doc = self.load("phi", path, "phi")
            return phi_from_dict(doc)
        if A is not None and A.phi is not None:
            return A.phi
        logging.info("No comparison function given; using phi(t) = t")
        return ComparisonFunction.identity()

    def cover(self, path, what):
        if not path:
            raise MissingWitness(f"{what} needs a cover", role="cover")
        _, doc = self.load("cover", path, "cover")
        return cover_from_dict(doc)

    def witness(self, path, what):
        if not path:
            raise MissingWitness(f"{what} needs a (delta, cover) witness", role="witness")
        _, doc = self.load("witness", path, "witness")
        return witness_from_dict(doc)

    def report(self, code, result, out=None):
        manifest = RunManifest(self.command, self.digests, self.parameters, TOOL_VERSION, str(out or ""))
        return code, {
            "schema": SCHEMA_TAG,
            "command": self.command,
            "exit_code": code,
            "manifest": manifest.to_dict(),
            "result": result,
        }

    def fail(self, error, out=None):
        code = exit_code_for(error)
        if isinstance(error, LipcertError):
            detail = error.to_dict()
        else:
            detail = {"error": "invalid_argument", "message": str(error), "witness": {}}
        if isinstance(error, PostconditionFailed):
            logging.error(f"{self.command}: {error}")
        else:
            logging.warning(f"{self.command} failed ({detail['error']}): {error}")
        return self.report(code, dict(detail, verdict=FAIL), out)


def _parse_shape(spec):
    if isinstance(spec, (list, tuple)):
        parts = [int(p) for p in spec]
    else:
        parts = [int(p) for p in str(spec).split(",") if p.strip()]
    if len(parts) != 3:
        raise ValueError(f"--random expects n,m,d, got '{spec}'")
    return parts


def _code(passed):
    return 0 if passed else 1


def cmd_validate(path, settings, out=None):
    """Validate a space, comparison function or family document"""
    run = CommandRun("validate", settings, {"input": Path(path).name})
    try:
        kind, doc = run.load("input", path)
        tol = run.tol
        points = int(settings.get("comparison_grid_points", 1025))
        result = {"kind": kind, "verdict": PASS}
        if kind == "space":
            space = space_from_dict(doc, tol)
            result.update(points=space.n, diameter=space.diameter)
        elif kind == "phi":
            phi = phi_from_dict(doc)
            result["phi"] = validate_comparison(phi, default_grid(phi, 1.0, points), 1.0, tol)
        elif kind == "family":
            A = family_from_dict(doc, tol)
            result.update(points=A.domain.n, members=A.size, dimension=A.dimension)
            if A.phi is not None:
                upper = A.domain.diameter or 1.0
                result["phi"] = validate_comparison(A.phi, default_grid(A.phi, upper, points), upper, tol)
        elif kind == "witness":
            result["delta"] = float(doc["delta"])
        logging.info(f"validate: {kind} document {path} is valid")
        return run.report(0, result, out)
    except (LipcertError, ValueError) as e:
        return run.fail(e, out)


def cmd_check(condition, settings, family=None, random_spec=None, cover=None, phi=None, witness=None,
              eps=None, delta=None, n=None, Y=None, difference=False, out=None):
    """Run one condition checker and return its ConditionReport in a command report"""
    eps = float(settings.get("default_eps", 0.5) if eps is None else eps)
    run = CommandRun("check", settings, {
        "condition": condition, "eps": eps, "delta": delta, "n": n, "Y": Y,
        "difference": difference, "random": random_spec, "seed": settings.get("seed", 0) if random_spec else None,
    })
    try:
        if condition not in CONDITIONS:
            raise ValueError(f"Unknown condition '{condition}', expected one of {CONDITIONS}")
        A = run.family(family, random_spec)
        target = difference_family(A) if difference else A
        tol = run.tol
        if condition == "equinormed":
            if not Y:
                raise MissingWitness("equinormed needs a point subset Y", role="Y")
            report = check_equinormed(target, Y, eps, tol)
        elif condition == "B":
            report = check_B(target, run.cover(cover, "B"), eps, tol)
        elif condition == "DS":
            report = check_DS(target, run.cover(cover, "DS"), eps, tol)
        elif condition == "equicontinuity":
            if delta is None:
                raise MissingWitness("equicontinuity needs delta", role="delta")
            report = check_equicontinuity(target, float(delta), eps, tol)
        elif condition == "L":
            report = check_L(target, run.phi(phi, A), run.cover(cover, "L"), eps, tol)
        elif condition == "LDS":
            report = check_LDS(target, run.phi(phi, A), run.cover(cover, "LDS"), eps, tol)
        elif condition == "lambda":
            w = run.witness(witness, "lambda")
            report = check_lambda(target, run.phi(phi, A), eps, float(n or w.n), w, tol)
        else:
            if delta is None:
                raise MissingWitness("flatness needs delta", role="delta")
            report = check_uniform_local_flatness(target, run.phi(phi, A), float(delta), eps, tol)
        logging.info(f"check {condition} on {'A - A' if difference else 'A'}: {report.verdict} "
                     f"(achieved {report.achieved:.6g}, eps {eps})")
        result = dict(report.to_dict(), target="A-A" if difference else "A")
        return run.report(_code(report.passed), result, out)
    except (LipcertError, ValueError) as e:
        return run.fail(e, out)


def _tilde_verification(A, phi, tilde, tol):
    achieved, witness, _ = pair_quotient_oscillation(difference_family(A), phi, tilde.cover.parts)
    verdict = PASS if achieved <= tilde.eps + tol else FAIL
    return {"condition": "tilde", "eps": tilde.eps, "achieved": achieved, "verdict": verdict,
            "witness": witness if verdict == FAIL else {}, "anchor": ANCHORS["L"]}


def cmd_synthesize(kind, settings, family=None, random_spec=None, cover=None, phi=None, witness=None,
                   eps=None, delta=None, n=None, Y=None, net=None, net_budget=None, artifact=None, out=None):
    """
    Run one synthesizer, re-check its output and embed the verification verdict

    Returns:
        tuple: (exit code, report); the synthesized object is in result["artifact"] and is
        also written to ``artifact`` when given
    """
    eps = float(settings.get("default_eps", 0.5) if eps is None else eps)
    run = CommandRun("synthesize", settings, {
        "kind": kind, "eps": eps, "delta": delta, "n": n, "Y": Y, "net": net, "net_budget": net_budget,
        "random": random_spec, "seed": settings.get("seed", 0) if random_spec else None,
    })
    try:
        if kind not in SYNTHESIS_KINDS:
            raise ValueError(f"Unknown synthesis kind '{kind}', expected one of {SYNTHESIS_KINDS}")
        A = run.family(family, random_spec)
        D = difference_family(A)
        tol = run.tol
        budget = None if net_budget is None else int(net_budget)

        if kind == "B":
            made = synthesize_B_cover(A, eps, Y=Y, net_budget=budget, tol=tol)
            produced, verification = tagged(made.to_dict()), check_B(D, made, eps, tol).to_dict()
        elif kind == "DS":
            b_cover = run.cover(cover, "DS") if cover else synthesize_B_cover(A, eps / 8.0, net_budget=budget, tol=tol)
            made = synthesize_DS_from_B(A, b_cover, eps, net_budget=budget, tol=tol)
            produced, verification = tagged(made.to_dict()), check_DS(A, made, eps, tol).to_dict()
        elif kind == "equicontinuity-ds":
            if delta is None:
                raise MissingWitness("equicontinuity-ds needs delta", role="delta")
            made = ds_cover_from_equicontinuity(A, float(delta), eps, tol)
            produced, verification = tagged(made.to_dict()), check_DS(A, made, eps, tol).to_dict()
        elif kind == "ds-equicontinuity":
            radius = equicontinuity_from_ds(A, run.cover(cover, "ds-equicontinuity"), eps, tol)
            produced = {"delta": radius}
            verification = check_equicontinuity(A, radius, eps, tol).to_dict()
        elif kind == "equinorm":
            made = equinorm_witness_from_B(A, run.cover(cover, "equinorm"), eps, tol)
            produced = made.to_dict()
            verification = check_equinormed(A, made.Y, made.eps, tol).to_dict()
        elif kind == "equinormed-bound":
            if not Y:
                raise MissingWitness("equinormed-bound needs a point subset Y", role="Y")
            produced = equinormed_sup_bound(A, Y, eps, tol)
            verification = {"condition": "equinormed", "verdict": PASS, "anchor": ANCHORS["equinormed"]}
        elif kind == "tilde":
            if delta is None:
                raise MissingWitness("tilde needs delta", role="delta")
            gauge = run.phi(phi, A)
            made = synthesize_tilde_cover(A, gauge, float(delta), eps, tol)
            produced = dict(made.to_dict(), cover=tagged(made.cover.to_dict()))
            verification = _tilde_verification(A, gauge, made, tol)
        elif kind == "lambda-from-L":
            if n is None:
                raise MissingWitness("lambda-from-L needs n", role="n")
            gauge = run.phi(phi, A)
            made = lambda_from_L(A, gauge, run.cover(cover, "lambda-from-L"), eps, float(n), tol)
            produced = tagged(made.to_dict())
            verification = check_lambda(D, gauge, eps, made.n, made, tol).to_dict()
        elif kind == "L-from-lambda":
            gauge = run.phi(phi, A)
            made, bounds = L_from_lambda(A, gauge, run.witness(witness, "L-from-lambda"), eps, tol)
            produced = dict(tagged(made.to_dict()), bounds=bounds.to_dict())
            verification = check_L(D, gauge, made, eps, tol).to_dict()
        elif kind == "lambda-from-flatness":
            if n is None or delta is None:
                raise MissingWitness("lambda-from-flatness needs n and the flatness radius delta", role="n")
            gauge = run.phi(phi, A)
            made = lambda_from_flatness(A, gauge, eps, float(n), float(delta), tol)
            produced = tagged(made.to_dict())
            verification = check_lambda(D, gauge, eps, made.n, made, tol).to_dict()
        elif kind == "flatness":
            gauge = run.phi(phi, A)
            members = list(net) if net else family_net(A, eps / 2.0, "lip", gauge)
            radius = flatness_from_net(A, gauge, members, eps, tol)
            produced = {"delta": radius, "net": [int(k) for k in members]}
            verification = check_uniform_local_flatness(A, gauge, radius, eps, tol).to_dict()
        else:
            gauge = run.phi(phi, A)
            bounds = lambda_boundedness(A, gauge, run.witness(witness, "lambda-bounds"), eps, tol)
            produced = bounds.to_dict()
            verification = {"condition": "lambda-bounds", "verdict": PASS if bounds.holds else FAIL,
                            "anchor": ANCHORS["lambda"]}

        if artifact:
            write_report(produced, artifact, int(settings.get("report", {}).get("indent", 2)))
        verdict = verification["verdict"]
        logging.info(f"synthesize {kind}: verification {verdict}")
        return run.report(_code(verdict == PASS), {"kind": kind, "artifact": produced,
                                                  "verification": verification, "verdict": verdict}, out)
    except (LipcertError, ValueError) as e:
        return run.fail(e, out)


def cmd_oracle(settings, space=None, family=None, random_spec=None, phi=None, eps_grid=None,
               kind=None, parts=None, elements=None, difference=False, xlsx=None, out=None):
    """Exact covering profile of a space, optionally with the exact minimal oscillation of a family"""
    limits = settings.get("oracle", {})
    run = CommandRun("oracle", settings, {
        "eps_grid": eps_grid, "kind": kind, "parts": parts, "difference": difference,
        "random": random_spec, "seed": settings.get("seed", 0) if random_spec else None,
    })
    try:
        A = None
        if family or random_spec:
            A = run.family(family, random_spec)
        if space:
            _, doc = run.load("space", space, "space")
            metric = space_from_dict(doc, run.tol)
        elif A is not None:
            metric = A.domain
        else:
            raise MissingWitness("oracle needs a space, a family or --random", role="space")

        grid = eps_grid or Utils.eps_grid(metric.diameter or 1.0, int(settings.get("eps_grid_depth", 6)))
        profile = covering_profile(metric, grid, int(limits.get("max_points", 16)))
        result = {"covering_profile": profile.to_dict(), "points": metric.n}

        min_osc = None
        if kind:
            if A is None:
                raise MissingWitness("Minimal oscillation needs a family", role="family")
            target = difference_family(A) if difference else A
            gauge = run.phi(phi, A) if kind in ("L", "LDS") else None
            value = exact_min_oscillation(target, int(parts or 1), kind, gauge, elements,
                                          int(limits.get("max_ambient", 8)), int(limits.get("max_parts", 4)))
            min_osc = {"kind": kind, "parts": int(parts or 1), "target": "A-A" if difference else "A", "value": value}
            result["min_oscillation"] = min_osc

        if xlsx:
            OutputGenerator(settings).write_covering_profile(profile, xlsx, min_osc)
        return run.report(0, result, out)
    except (LipcertError, ValueError) as e:
        return run.fail(e, out)


def cmd_fixture(name, settings, params=None, xlsx=None, artifact=None, out=None):
    """Build a named fixture, re-verify every claim and report the outcome"""
    params = dict(params or {})
    run = CommandRun("fixture", settings, {"name": name, "params": params})
    try:
        fixture = build_fixture(name, params)
        results = verify_fixture(fixture, run.tol)
        verified = all(r.ok for r in results)
        produced = tagged(fixture.to_dict())
        if artifact:
            write_report(produced, artifact, int(settings.get("report", {}).get("indent", 2)))
        if xlsx:
            OutputGenerator(settings).write_fixture(fixture, results, xlsx)
        result = {
            "fixture": produced,
            "claims": [r.to_dict() for r in results],
            "verified": verified,
            "verdict": PASS if verified else FAIL,
        }
        return run.report(_code(verified), result, out)
    except (LipcertError, ValueError, TypeError) as e:
        return run.fail(e, out)
