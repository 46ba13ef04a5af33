"""Command-line front end: ``chaoscrypt <subcommand> ...``."""

from __future__ import annotations

import argparse
import sys
import time

from . import analysis
from .cipher import CipherEnvelope, ChaosKey, decrypt, encrypt
from .dynamics import State4, SystemParams, simulate
from .ecc import validate_curve
from .errors import (
    ChaosCryptError,
    DimensionMismatch,
    IntegrationDiverged,
    KeyFileError,
    MalformedEnvelope,
    MalformedHeader,
    TruncatedData,
    UnsupportedMaxval,
)
from .keys import EccKey, dump_chaos_key, dump_ecc_key, load_chaos_key, load_ecc_key
from .lyapunov import is_hyperchaotic, run_spectrum, write_history_csv
from .ppm import load_ppm, read_image, reference_image, write_image

_CHAOS_OPTS = [
    ("a", "a", float, "a: x-equation coupling (default 10)"),
    ("b", "b", float, "b: constant drain in the z equation (default 3)"),
    ("c", "c", float, "c: y self-growth (default 2.5)"),
    ("e1", "e1", float, "e1: xz nonlinearity in the y equation (default 12)"),
    ("e2", "e2", float, "e2: y^2 nonlinearity in the z equation (default 0.1)"),
    ("m", "m", float, "m: y coupling in the w equation (default 2)"),
    ("k", "k_fb", float, "k: linear state-feedback gain of w into y (default 2)"),
]
_INIT_OPTS = [(n, f"{n}: initial condition (default 1)") for n in ("x0", "y0", "z0", "w0")]


def _add_chaos_args(p: argparse.ArgumentParser, with_file: bool = True) -> None:
    g = p.add_argument_group("hyper-chaotic system (reference values)")
    if with_file:
        g.add_argument("--chaos-key", metavar="FILE", help="chaos key file (name = value lines)")
    for flag, _, typ, help_ in _CHAOS_OPTS:
        g.add_argument(f"--{flag}", type=typ, dest=f"chaos_{flag}", help=help_)
    for flag, help_ in _INIT_OPTS:
        g.add_argument(f"--{flag}", type=float, help=help_)
    g.add_argument("--dt", type=float, help="integration step (default 0.002)")
    g.add_argument("--transient", type=int, help="transient steps discarded before use (default 1000)")


def _add_ecc_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("elliptic curve (reference values)")
    g.add_argument("--ecc-key", metavar="FILE", help="ECC key file (name = value lines)")
    g.add_argument("--curve-a", type=int, help="a: curve coefficient (default 5376)")
    g.add_argument("--curve-b", type=int, help="b: curve coefficient (default 2438)")
    g.add_argument("--p", type=int, help="p: prime modulus (default 123457)")
    g.add_argument("--Gx", type=int, help="G.x: base point X (default 2225)")
    g.add_argument("--Gy", type=int, help="G.y: base point Y (default 75856)")
    g.add_argument("--y", type=int, help="y: Bob's private key (default 36548)")
    g.add_argument("--ecc-k", type=int, help="k: sender's random integer (default 23412)")
    g.add_argument("--PBx", type=int, help="P_B.x: Bob's public key X (default 30402)")
    g.add_argument("--PBy", type=int, help="P_B.y: Bob's public key Y (default 35513)")


def _read_text(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def chaos_key_from_args(ns) -> ChaosKey:
    key = load_chaos_key(_read_text(ns.chaos_key)) if getattr(ns, "chaos_key", None) else ChaosKey()
    p = key.params
    params = SystemParams(
        **{
            field: getattr(ns, f"chaos_{flag}") if getattr(ns, f"chaos_{flag}") is not None else getattr(p, field)
            for flag, field, _, _ in _CHAOS_OPTS
        }
    )
    init = State4(*(getattr(ns, n) if getattr(ns, n) is not None else v for n, v in zip(("x0", "y0", "z0", "w0"), key.initial)))
    dt = ns.dt if ns.dt is not None else key.dt
    transient = ns.transient if ns.transient is not None else key.n_transient
    return ChaosKey(params, init, dt, transient)


def ecc_key_from_args(ns) -> EccKey:
    key = load_ecc_key(_read_text(ns.ecc_key)) if ns.ecc_key else EccKey()
    c = key.curve
    if any(v is not None for v in (ns.curve_a, ns.curve_b, ns.p)):
        c = validate_curve(
            ns.curve_a if ns.curve_a is not None else c.a,
            ns.curve_b if ns.curve_b is not None else c.b,
            ns.p if ns.p is not None else c.p,
        )
    G = (ns.Gx if ns.Gx is not None else key.G[0], ns.Gy if ns.Gy is not None else key.G[1])
    y = ns.y if ns.y is not None else key.y
    k = ns.ecc_k if ns.ecc_k is not None else key.k
    P_B = key.P_B
    if ns.PBx is not None or ns.PBy is not None:
        P_B = (ns.PBx if ns.PBx is not None else P_B[0], ns.PBy if ns.PBy is not None else P_B[1])
    elif (ns.y is not None or G != key.G or c != key.curve) and y is not None:
        P_B = None  # recomputed as y*G
    try:
        return EccKey(c, G, y, k, P_B)
    except KeyFileError as exc:
        raise KeyFileError(f"inconsistent ECC key: {exc}") from None


def _load_input(path: str | None):
    return reference_image() if path is None else read_image(path)


def cmd_simulate(ns) -> int:
    key = chaos_key_from_args(ns)
    traj = simulate(key.initial, key.params, key.dt, ns.steps, key.n_transient)
    if ns.output == "-":
        traj.write_csv(sys.stdout)
    else:
        with open(ns.output, "w", encoding="utf-8") as fh:
            traj.write_csv(fh)
        print(f"wrote {len(traj)} states to {ns.output}")
    return 0


def cmd_lyapunov(ns) -> int:
    key = chaos_key_from_args(ns)
    t0 = time.perf_counter()
    run = run_spectrum(
        key.params,
        key.initial,
        dt=key.dt,
        t_total=ns.t_total,
        renorm_every=ns.renorm_every,
        transient=ns.transient_time,
        record_every=ns.record_every if ns.history else 0,
    )
    s = run.spectrum
    for i, v in enumerate(s, 1):
        print(f"LE{i}={v:.6f}")
    print(f"sum={s.total:.6f}")
    print(f"divergence={key.params.divergence:.6f}")
    verdict = "hyper-chaotic" if is_hyperchaotic(s, ns.threshold) else "not hyper-chaotic"
    print(f"verdict={verdict}")
    print(f"elapsed_s={time.perf_counter() - t0:.2f}", file=sys.stderr)
    if ns.history:
        with open(ns.history, "w", encoding="utf-8") as fh:
            write_history_csv(run.history, fh)
    return 0


def cmd_encrypt(ns) -> int:
    key, ecc = chaos_key_from_args(ns), ecc_key_from_args(ns)
    if ecc.k is None or ecc.P_B is None:
        raise KeyFileError("encryption needs k and P_B in the ECC key")
    env = encrypt(_load_input(ns.input), key, ecc.G, ecc.P_B, ecc.curve, ecc.k)
    with open(ns.output, "wb") as fh:
        fh.write(env.to_bytes())
    if ns.cipher_image:
        write_image(ns.cipher_image, env.as_image())
    print(f"encrypted {env.width}x{env.height}x{env.channels} -> {ns.output}; kG={env.kG}")
    return 0


def cmd_decrypt(ns) -> int:
    key, ecc = chaos_key_from_args(ns), ecc_key_from_args(ns)
    if ecc.y is None:
        raise KeyFileError("decryption needs the private key y in the ECC key")
    with open(ns.input, "rb") as fh:
        env = CipherEnvelope.from_bytes(fh.read())
    img = decrypt(env, key, ecc.y, ecc.curve, ecc.G)
    write_image(ns.output, img)
    print(f"decrypted {img.width}x{img.height}x{img.channels} -> {ns.output}")
    return 0


def _image_from(path: str):
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw[:4] == b"CHC1":
        return CipherEnvelope.from_bytes(raw).as_image()
    return load_ppm(raw)


def cmd_analyze(ns) -> int:
    img = _image_from(ns.input) if ns.input else reference_image()
    out = analysis.analysis_report(img)
    if ns.compare:
        other = _image_from(ns.compare)
        names = analysis.CHANNEL_NAMES[img.channels]
        out += "\n[differential]\n"
        out += "".join(f"{n}.npcr={v:.4f}\n" for n, v in zip(names, analysis.npcr(img, other)))
        out += "".join(f"{n}.uaci={v:.4f}\n" for n, v in zip(names, analysis.uaci(img, other)))
    sys.stdout.write(out)
    if ns.histogram_csv:
        with open(ns.histogram_csv, "w", encoding="utf-8") as fh:
            analysis.write_histogram_csv(analysis.histogram(img), fh)
    if ns.scatter_csv:
        with open(ns.scatter_csv, "w", encoding="utf-8") as fh:
            analysis.write_scatter_csv(img, fh, ns.scatter_samples)
    return 0


def cmd_experiment(ns) -> int:
    key, ecc = chaos_key_from_args(ns), ecc_key_from_args(ns)
    img = _load_input(ns.input)
    names = analysis.CHANNEL_NAMES[img.channels]
    if ns.name == "differential":
        rep = analysis.differential_experiment(img, key, ecc, ns.row, ns.col, ns.trials, ns.seed)
        print("[differential]")
        print(f"pixel=({ns.row},{ns.col})")
        print(f"trials={rep.trials}")
        for n, v in zip(names, rep.npcr):
            print(f"{n}.npcr={v:.4f}")
        for n, v in zip(names, rep.uaci):
            print(f"{n}.uaci={v:.4f}")
    elif ns.name == "key-sensitivity":
        rep = analysis.key_sensitivity_experiment(img, key, ecc, ns.component, ns.delta)
        print("[key-sensitivity]")
        print(f"perturbation={ns.component}0+{ns.delta!r}")
        print(f"true_key_exact={str(rep.roundtrip_exact).lower()}")
        for n, v in zip(names, rep.wrong_key_npcr):
            print(f"{n}.wrong_key_npcr={v:.4f}")
        if ns.output:
            write_image(ns.output, rep.wrong_key_image)
    else:
        rep = analysis.data_loss_experiment(img, key, ecc, (ns.row - 1, ns.col - 1), (ns.size, ns.size))
        print("[data-loss]")
        print(f"cut={ns.size}x{ns.size} at ({ns.row},{ns.col})")
        for n, v in zip(names, rep.channel_fraction):
            print(f"{n}.corrupted_fraction={v:.6f}")
        print(f"sample_fraction={rep.sample_fraction:.6f}")
        print(f"pixel_fraction={rep.pixel_fraction:.6f}")
        if ns.output:
            write_image(ns.output, rep.decrypted)
    return 0


def cmd_keys(ns) -> int:
    key, ecc = chaos_key_from_args(ns), ecc_key_from_args(ns)
    with open(ns.chaos_out, "w", encoding="utf-8") as fh:
        fh.write(dump_chaos_key(key))
    with open(ns.ecc_out, "w", encoding="utf-8") as fh:
        fh.write(dump_ecc_key(ecc))
    print(f"wrote {ns.chaos_out} and {ns.ecc_out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chaoscrypt", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate the flow and write a t,x,y,z,w CSV")
    _add_chaos_args(p)
    p.add_argument("--steps", type=int, default=50000, help="post-transient steps (default 50000)")
    p.add_argument("-o", "--output", default="-", help="CSV path, '-' for stdout")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("lyapunov", help="estimate the Lyapunov spectrum")
    _add_chaos_args(p)
    p.add_argument("--t-total", type=float, default=5000.0, help="averaging time (default 5000)")
    p.add_argument("--renorm-every", type=int, default=10, help="steps between Gram-Schmidt passes (default 10)")
    p.add_argument("--transient-time", type=float, default=10.0, help="time discarded before averaging (default 10)")
    p.add_argument("--threshold", type=float, default=0.01, help="positivity threshold for the verdict (default 0.01)")
    p.add_argument("--history", metavar="CSV", help="write running estimates to this CSV")
    p.add_argument("--record-every", type=int, default=5000, help="history stride in steps (default 5000)")
    p.set_defaults(func=cmd_lyapunov)

    p = sub.add_parser("encrypt", help="encrypt a PPM/PGM image into an envelope")
    p.add_argument("-i", "--input", help="input PPM/PGM (default: bundled test image)")
    p.add_argument("-o", "--output", required=True, help="envelope path")
    p.add_argument("--cipher-image", metavar="PPM", help="also write the cipher bytes as an image")
    _add_chaos_args(p)
    _add_ecc_args(p)
    p.set_defaults(func=cmd_encrypt)

    p = sub.add_parser("decrypt", help="decrypt an envelope into a PPM/PGM image")
    p.add_argument("-i", "--input", required=True, help="envelope path")
    p.add_argument("-o", "--output", required=True, help="output PPM/PGM")
    _add_chaos_args(p)
    _add_ecc_args(p)
    p.set_defaults(func=cmd_decrypt)

    p = sub.add_parser("analyze", help="histogram and adjacent-pixel correlation report")
    p.add_argument("-i", "--input", help="PPM/PGM or envelope (default: bundled test image)")
    p.add_argument("--compare", metavar="PATH", help="second image/envelope for NPCR/UACI")
    p.add_argument("--histogram-csv", metavar="CSV")
    p.add_argument("--scatter-csv", metavar="CSV", help="adjacent-pair samples per direction/channel")
    p.add_argument("--scatter-samples", type=int, default=3000)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("experiment", help="run a named reproduction experiment")
    p.add_argument("name", choices=["differential", "key-sensitivity", "data-loss"])
    p.add_argument("-i", "--input", help="input PPM/PGM (default: bundled test image)")
    p.add_argument("-o", "--output", help="write the decrypted image (key-sensitivity, data-loss)")
    p.add_argument("--row", type=int, default=100, help="1-based row of the changed pixel / cut origin (default 100)")
    p.add_argument("--col", type=int, default=100, help="1-based column (default 100)")
    p.add_argument("--trials", type=int, default=1, help="differential: average over this many pixels")
    p.add_argument("--seed", type=int, default=0, help="differential: seed for the extra trial pixels")
    p.add_argument("--component", default="y", choices=list(State4._fields), help="key-sensitivity: perturbed initial value")
    p.add_argument("--delta", type=float, default=1e-15, help="key-sensitivity: perturbation (default 1e-15)")
    p.add_argument("--size", type=int, default=50, help="data-loss: side of the square cut (default 50)")
    _add_chaos_args(p)
    _add_ecc_args(p)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("keys", help="write chaos and ECC key files (defaults: reference values)")
    p.add_argument("--chaos-out", default="chaos.key")
    p.add_argument("--ecc-out", default="ecc.key")
    _add_chaos_args(p)
    _add_ecc_args(p)
    p.set_defaults(func=cmd_keys)
    return parser


_LABELS = [
    (KeyFileError, "bad key file"),
    (MalformedEnvelope, "malformed envelope"),
    (DimensionMismatch, "dimension mismatch"),
    ((MalformedHeader, TruncatedData, UnsupportedMaxval), "bad image file"),
    (IntegrationDiverged, "integration diverged"),
    (ChaosCryptError, "error"),
    (OSError, "I/O error"),
]


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        return ns.func(ns)
    except (ChaosCryptError, OSError) as exc:
        label = next(lbl for cls, lbl in _LABELS if isinstance(exc, cls))
        print(f"chaoscrypt: {label}: {exc}", file=sys.stderr)
        return 1
