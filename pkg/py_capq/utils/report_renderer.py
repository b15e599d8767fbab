import io
import json
from typing import Any, Dict, List

from ..indices.report import IndexEntry, IndexReport


def _format_number(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _entry_value(entry: IndexEntry) -> str:
    if entry.infinite:
        return "inf"
    if entry.undefined:
        return "undefined"
    return _format_number(entry.value)


def _entry_interval(entry: IndexEntry) -> str:
    if entry.interval is None:
        return ""
    iv = entry.interval
    flag = " (point outside)" if iv.point_outside else ""
    return f"[{iv.lower:.6g}, {iv.upper:.6g}] @ {iv.level:g}{flag}"


def _table(out: io.StringIO, header: List[str], rows: List[List[str]]) -> None:
    widths = [max(len(r[i]) for r in [header] + rows) for i in range(len(header))]
    out.write("  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip() + "\n")
    out.write("  ".join("-" * w for w in widths) + "\n")
    for row in rows:
        out.write("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() + "\n")


def render_json(report: IndexReport) -> str:
    """Stable key order; floats use the shortest repr that reads back to the same double (never
    more than 17 significant digits); no NaN or inf ever reaches the output."""
    return json.dumps(report.model_dump(mode="json"), sort_keys=True, indent=2, allow_nan=False) + "\n"


def render_text(report: IndexReport) -> str:
    out = io.StringIO(newline='')
    out.write(f"{report.tool} {report.version}: {report.command}\n")
    if report.model is not None:
        params = report.model.get("params", {})
        args = ", ".join(f"{k}={_format_number(v)}" for k, v in params.items())
        out.write(f"model: {report.model.get('family', '?')}({args})\n")
    if report.seeds:
        out.write("seeds: " + ", ".join(f"{k}={v}" for k, v in sorted(report.seeds.items())) + "\n")

    if report.entries:
        out.write("\n")
        rows = [[e.name, _entry_value(e), _entry_interval(e),
                 ", ".join(f"{k}={_format_number(v)}" for k, v in e.components.items())]
                for e in report.entries]
        _table(out, ["index", "value", "interval", "components"], rows)

    fits = report.details.get("fits") or report.details.get("pipeline", {}).get("fits")
    if fits:
        out.write("\n")
        rows = [[f.get("structural_function", ""), f["family"], _format_number(f.get("ks_statistic")),
                 _format_number(f.get("adequate")), f.get("error") or ""] for f in fits]
        _table(out, ["N", "family", "KS", "adequate", "error"], rows)

    indices = report.details.get("indices")
    if indices:
        out.write("\n")
        _table(out, ["index", "label", "basis", "formula"],
               [[d["name"], d["label"], d["basis"], d["formula"]] for d in indices])
        corrected = [d for d in indices if d.get("correction")]
        if corrected:
            out.write("\ncorrections:\n")
            for d in corrected:
                out.write(f"  {d['name']}: {d['correction']}\n")

    oracle: Dict[str, Any] = report.details.get("oracle")
    if oracle:
        out.write("\n")
        _table(out, ["quantity", "value"], [[k, _format_number(v)] for k, v in oracle.items()])

    notes = [(e.name, n) for e in report.entries for n in e.notes]
    if notes:
        out.write("\nnotes:\n")
        for name, note in notes:
            out.write(f"  {name}: {note}\n")
    if report.defaults_applied:
        out.write("\ndefaults applied:\n")
        for item in report.defaults_applied:
            out.write(f"  {item['field']} = {json.dumps(item['value'], sort_keys=True)}\n")
    if report.warnings:
        out.write("\nwarnings:\n")
        for w in report.warnings:
            out.write(f"  {w}\n")
    return out.getvalue()


def render_report(report: IndexReport, fmt: str = "json") -> str:
    if fmt == "json":
        return render_json(report)
    if fmt == "text":
        return render_text(report)
    raise ValueError(f"unknown report format '{fmt}'")
