"""Report rendering: key/value and table output, lattice exports, figures.

The key/value format is one ``key=value`` pair per line, lists joined by
single spaces; it is the machine-readable side of every subcommand.  Figure
rendering is file-based (no interactive backend): a layered Hasse diagram for
concept lattices and one heatmap per relation for models.
"""

from __future__ import annotations

import os
from typing import Iterable, Optional

import numpy as np

from . import fca, syntax
from .fca import Context, FuzzyConcept
from .heyting import Algebra
from .tableau import TraceStep, Verdict, term_text


def kv_line(key: str, value) -> str:
    if isinstance(value, (list, tuple)):
        value = " ".join(str(v) for v in value)
    return f"{key}={value}"


def fuzzy_values(alg: Algebra, codes) -> str:
    return " ".join(alg.render(int(v)) for v in codes)


# -- lattice reports ----------------------------------------------------------


def lattice_kv(ctx: Context, concepts: list[FuzzyConcept],
               edges: list[tuple[int, int]]) -> list[str]:
    alg = ctx.algebra
    lines = [
        kv_line("objects", ctx.objects),
        kv_line("features", ctx.features),
        kv_line("concepts", len(concepts)),
    ]
    for i, c in enumerate(concepts, start=1):
        lines.append(kv_line(f"concept.{i}.extent",
                             fuzzy_values(alg, c.extent.codes)))
        lines.append(kv_line(f"concept.{i}.intent",
                             fuzzy_values(alg, c.intent.codes)))
    lines.append(kv_line("hasse", [f"{lo + 1}<{hi + 1}" for lo, hi in edges]))
    index = {c: i + 1 for i, c in enumerate(concepts)}
    for role in ctx.box:
        for i, c in enumerate(concepts, start=1):
            image = fca.box_op(ctx, role, c)
            lines.append(kv_line(f"op.{role}.{i}", index[image]))
    for role in ctx.dia:
        for i, c in enumerate(concepts, start=1):
            image = fca.dia_op(ctx, role, c)
            lines.append(kv_line(f"op.{role}.{i}", index[image]))
    return lines


def lattice_tables(ctx: Context, concepts: list[FuzzyConcept],
                   edges: list[tuple[int, int]]) -> list[str]:
    alg = ctx.algebra
    lines = [f"{len(concepts)} concepts over "
             f"{len(ctx.objects)} objects x {len(ctx.features)} features", ""]
    ext_header = " ".join(ctx.objects)
    int_header = " ".join(ctx.features)
    lines.append(_table(
        ["#", f"extent ({ext_header})", f"intent ({int_header})"],
        [[f"c{i + 1}", fuzzy_values(alg, c.extent.codes),
          fuzzy_values(alg, c.intent.codes)]
         for i, c in enumerate(concepts)]))
    lines.append("")
    lines.append("cover edges (lower < upper): " +
                 (" ".join(f"c{lo + 1}<c{hi + 1}" for lo, hi in edges) or "none"))
    index = {c: i + 1 for i, c in enumerate(concepts)}
    for role, op in [(r, fca.box_op) for r in ctx.box] + \
                    [(r, fca.dia_op) for r in ctx.dia]:
        row = [f"c{index[op(ctx, role, c)]}" for c in concepts]
        lines.append("")
        lines.append(_table([role] + [f"c{i + 1}" for i in range(len(concepts))],
                            [["image"] + row]))
    return lines


def hasse_text(concepts: list[FuzzyConcept],
               edges: list[tuple[int, int]]) -> str:
    """Plain-text cover-edge list, one ``lower < upper`` pair per line."""
    return "\n".join(f"c{lo + 1} < c{hi + 1}" for lo, hi in edges) + "\n"


def hasse_dot(concepts: list[FuzzyConcept], edges: list[tuple[int, int]],
              alg: Algebra) -> str:
    lines = ["digraph lattice {", "  rankdir=BT;"]
    for i, c in enumerate(concepts, start=1):
        ext = fuzzy_values(alg, c.extent.codes)
        lines.append(f'  c{i} [label="c{i}\\n({ext})"];')
    for lo, hi in edges:
        lines.append(f"  c{lo + 1} -> c{hi + 1};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- verdict reports ------------------------------------------------------------


def check_kv(verdict: Verdict) -> list[str]:
    state = verdict.state
    alg = state.algebra
    lines = [kv_line("verdict",
                     "consistent" if verdict.consistent else "inconsistent")]
    if verdict.clash is not None:
        lines.append(kv_line("clash.term", term_text(verdict.clash.term)))
        lines.append(kv_line("clash.pos", alg.render(verdict.clash.pos_bound)))
        lines.append(kv_line("clash.neg", alg.render(verdict.clash.neg_bound)))
    lines.append(kv_line("facts", len(state.pos)))
    lines.append(kv_line("negative.facts",
                         sum(len(v) for v in state.neg.values())))
    lines.append(kv_line("constants", len(state.constants)))
    lines.append(kv_line("occurrence.concepts", len(state.occurrence)))
    for rule in sorted(state.rule_counts):
        lines.append(kv_line(f"rule.{rule}", state.rule_counts[rule]))
    return lines


def check_human(verdict: Verdict) -> list[str]:
    state = verdict.state
    alg = state.algebra
    if verdict.consistent:
        lines = ["consistent: the saturation closed without a clash"]
    else:
        w = verdict.clash
        lines = ["inconsistent: " + w.text(alg)]
    lines.append(f"facts: {len(state.pos)} positive, "
                 f"{sum(len(v) for v in state.neg.values())} negative; "
                 f"{len(state.constants)} constants; "
                 f"{len(state.occurrence)} occurring concepts")
    if state.rule_counts:
        lines.append(_table(
            ["rule", "applications"],
            [[rule, str(state.rule_counts[rule])]
             for rule in sorted(state.rule_counts)]))
    return lines


def trace_lines(steps: Iterable[TraceStep], alg: Algebra,
                kv: bool = False) -> list[str]:
    out = []
    for n, step in enumerate(steps, start=1):
        prem = ", ".join(f"{alg.render(b)} <= {term_text(t)}"
                         for t, b in step.premises)
        added = ", ".join(f"{alg.render(b)} <= {term_text(t)}"
                          for t, b in step.added)
        if kv:
            out.append(kv_line(f"step.{n}.rule", step.rule))
            if prem:
                out.append(kv_line(f"step.{n}.premises", prem))
            out.append(kv_line(f"step.{n}.added", added))
            if step.note:
                out.append(kv_line(f"step.{n}.note", step.note))
        else:
            note = f"   [{step.note}]" if step.note else ""
            out.append(f"{n:4d}  {step.rule:<10} premises: {prem or '-'} "
                       f"| added: {added}{note}")
    return out


def completion_lines(verdict: Verdict) -> list[str]:
    state = verdict.state
    alg = state.algebra
    lines = []
    for term, bound in sorted(state.pos.items(),
                              key=lambda kv: term_text(kv[0])):
        lines.append(f"{alg.render(bound)} <= {term_text(term)}")
    for term in sorted(state.neg, key=term_text):
        for bound in state.neg[term]:
            lines.append(f"not {alg.render(bound)} <= {term_text(term)}")
    return lines


# -- model reports ---------------------------------------------------------------


def relation_table(alg: Algebra, matrix: np.ndarray, row_names, col_names,
                   title: str) -> str:
    rows = [[rn] + [alg.render(int(v)) for v in matrix[i]]
            for i, rn in enumerate(row_names)]
    return _table([title] + list(col_names), rows)


def model_tables(ctx: Context) -> list[str]:
    lines = [relation_table(ctx.algebra, ctx.incidence, ctx.objects,
                            ctx.features, "I")]
    for role, rel in ctx.box.items():
        lines.append("")
        lines.append(relation_table(ctx.algebra, rel, ctx.objects,
                                    ctx.features, role))
    for role, rel in ctx.dia.items():
        lines.append("")
        lines.append(relation_table(ctx.algebra, rel, ctx.features,
                                    ctx.objects, role))
    return lines


def model_kv(ctx: Context) -> list[str]:
    alg = ctx.algebra
    lines = [kv_line("objects", ctx.objects),
             kv_line("features", ctx.features)]
    for i, name in enumerate(ctx.objects):
        lines.append(kv_line(f"I.{name}", fuzzy_values(alg, ctx.incidence[i])))
    for role, rel in ctx.box.items():
        for i, name in enumerate(ctx.objects):
            lines.append(kv_line(f"{role}.{name}", fuzzy_values(alg, rel[i])))
    for role, rel in ctx.dia.items():
        for i, name in enumerate(ctx.features):
            lines.append(kv_line(f"{role}.{name}", fuzzy_values(alg, rel[i])))
    return lines


# -- figures ----------------------------------------------------------------------


def _layer_positions(concepts, edges):
    n = len(concepts)
    below: dict[int, set[int]] = {i: set() for i in range(n)}
    for lo, hi in edges:
        below[hi].add(lo)
    depth = {}

    def rank(i):
        if i in depth:
            return depth[i]
        depth[i] = 1 + max((rank(j) for j in below[i]), default=0)
        return depth[i]

    for i in range(n):
        rank(i)
    levels: dict[int, list[int]] = {}
    for i, d in depth.items():
        levels.setdefault(d, []).append(i)
    pos = {}
    for d, members in levels.items():
        for k, i in enumerate(sorted(members)):
            pos[i] = (k - (len(members) - 1) / 2.0, d)
    return pos


def save_hasse_figure(alg: Algebra, concepts, edges, path: str) -> str:
    """Render the concept lattice's Hasse diagram to an image file."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    pos = _layer_positions(concepts, edges)
    fig, ax = plt.subplots(figsize=(6, 5))
    for lo, hi in edges:
        (x1, y1), (x2, y2) = pos[lo], pos[hi]
        ax.plot([x1, x2], [y1, y2], color="gray", zorder=1)
    for i, c in enumerate(concepts):
        x, y = pos[i]
        ext = fuzzy_values(alg, c.extent.codes)
        ax.scatter([x], [y], s=220, color="#4878cf", zorder=2)
        ax.annotate(f"c{i + 1}\n({ext})", (x, y),
                    textcoords="offset points", xytext=(0, 14),
                    ha="center", fontsize=8)
    ax.axis("off")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_relation_figure(alg: Algebra, matrix: np.ndarray, row_names,
                         col_names, title: str, path: str) -> str:
    """Render one relation as a value heatmap."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(
        figsize=(max(3.0, 0.5 * len(col_names) + 1.5),
                 max(2.5, 0.4 * len(row_names) + 1.2)))
    im = ax.imshow(matrix, cmap="viridis", vmin=0, vmax=len(alg) - 1)
    ax.set_xticks(range(len(col_names)), labels=col_names, rotation=90,
                  fontsize=7)
    ax.set_yticks(range(len(row_names)), labels=row_names, fontsize=7)
    ax.set_title(title)
    cbar = fig.colorbar(im, ax=ax, ticks=range(len(alg)))
    cbar.ax.set_yticklabels([alg.render(e) for e in alg.elements])
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_model_figures(ctx: Context, directory: str) -> list[str]:
    os.makedirs(directory, exist_ok=True)
    written = []
    written.append(save_relation_figure(
        ctx.algebra, ctx.incidence, ctx.objects, ctx.features, "I",
        os.path.join(directory, "I.png")))
    for role, rel in ctx.box.items():
        written.append(save_relation_figure(
            ctx.algebra, rel, ctx.objects, ctx.features, role,
            os.path.join(directory, f"{role}.png")))
    for role, rel in ctx.dia.items():
        written.append(save_relation_figure(
            ctx.algebra, rel, ctx.features, ctx.objects, role,
            os.path.join(directory, f"{role}.png")))
    return written


# -- plain text tables -------------------------------------------------------------


def _table(header: list[str], rows: list[list[str]]) -> str:
    cols = [header] + rows
    widths = [max(len(str(row[i])) for row in cols)
              for i in range(len(header))]
    def fmt(row):
        return "  ".join(str(v).ljust(w) for v, w in zip(row, widths)).rstrip()
    rule = "  ".join("-" * w for w in widths)
    return "\n".join([fmt(header), rule] + [fmt(r) for r in rows])
