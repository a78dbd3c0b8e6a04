"""Plain-text model files.

Layout, one record per line::

    gazeseev-svm 1
    classes 0 1 2
    params <C> <gamma>
    features <2|3>
    scaling none                      | scaling <offset...> / <scale...>
    pair <a> <b> <bias> <n_support>
    <coef> <f_1> ... <f_d>            (n_support lines)
    ...

Floats are written with 17 significant digits, so a read-back is exact.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..core import GazeFormatError
from .multiclass import Scaling, SvmModel
from .smo import BinarySvm, RbfParams

MAGIC = "gazeseev-svm 1"


def _f(v) -> str:
    return format(float(v), ".17g")


def save_model(model: SvmModel, path) -> None:
    lines = [MAGIC, "classes " + " ".join(str(c) for c in model.classes),
             f"params {_f(model.params.c)} {_f(model.params.gamma)}", f"features {model.n_features}"]
    if model.scaling is None:
        lines.append("scaling none")
    else:
        lines.append("scaling " + " ".join(map(_f, model.scaling.offset)) + " / "
                     + " ".join(map(_f, model.scaling.scale)))
    for (a, b), m in model.pairwise_models.items():
        lines.append(f"pair {a} {b} {_f(m.bias)} {len(m.dual_coefficients)}")
        for coef, sv in zip(m.dual_coefficients, m.support_points):
            lines.append(" ".join([_f(coef)] + [_f(v) for v in sv]))
    Path(path).write_text("\n".join(lines) + "\n")


def load_model(path) -> SvmModel:
    path = Path(path)
    lines = path.read_text().splitlines()
    pos = 0

    def take(prefix: str) -> list[str]:
        nonlocal pos
        if pos >= len(lines) or not lines[pos].startswith(prefix):
            raise GazeFormatError(f"{path}: line {pos + 1}: expected '{prefix}'")
        parts = lines[pos][len(prefix):].split()
        pos += 1
        return parts

    try:
        if not lines or lines[0].strip() != MAGIC:
            raise GazeFormatError(f"{path}: not a model file (missing '{MAGIC}' header)")
        pos = 1
        classes = tuple(int(c) for c in take("classes "))
        c, gamma = (float(v) for v in take("params "))
        params = RbfParams(c, gamma)
        n_features = int(take("features ")[0])
        scaling_parts = take("scaling ")
        scaling = None
        if scaling_parts != ["none"]:
            cut = scaling_parts.index("/")
            scaling = Scaling(np.array(scaling_parts[:cut], dtype=float), np.array(scaling_parts[cut + 1:], dtype=float))
        models = {}
        while pos < len(lines) and lines[pos].strip():
            a, b, bias, n = take("pair ")
            rows = [lines[pos + k].split() for k in range(int(n))]
            pos += int(n)
            arr = np.array(rows, dtype=float).reshape(int(n), n_features + 1)
            models[(int(a), int(b))] = BinarySvm(arr[:, 1:].copy(), arr[:, 0].copy(), float(bias), params)
    except (ValueError, IndexError) as exc:
        raise GazeFormatError(f"{path}: malformed model file near line {pos + 1}: {exc}") from None
    expected = len(classes) * (len(classes) - 1) // 2
    if len(models) != expected:
        raise GazeFormatError(f"{path}: {len(models)} pairwise models for {len(classes)} classes (expected {expected})")
    return SvmModel(classes, models, params, use_time=n_features == 3, scaling=scaling)
