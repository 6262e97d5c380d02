"""Configuration, logging and report-file helpers for the workbench CLI and service."""

from __future__ import annotations

import logging
import os
import re
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def int_env(name: str, default: int, minimum: int = 1) -> int:
    raw = os.getenv(name, "").strip()
    if not raw:
        return default
    try:
        value = int(raw)
    except ValueError:
        return default
    return max(minimum, value)


def configure_logging(verbosity: int = 0) -> None:
    """Send logs to stderr; ``-v`` gives INFO, ``-vv`` DEBUG, else REPFREE_LOG_LEVEL."""
    if verbosity >= 2:
        level = logging.DEBUG
    elif verbosity == 1:
        level = logging.INFO
    else:
        name = os.getenv("REPFREE_LOG_LEVEL", "WARNING").strip().upper()
        level = getattr(logging, name, logging.WARNING)
        if not isinstance(level, int):
            level = logging.WARNING
    logging.basicConfig(level=level, format=LOG_FORMAT)
    logging.getLogger("src").setLevel(level)


def read_source(path: str) -> str:
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read()


def _slugify(source: str) -> str:
    cleaned = Path(source).stem.strip().lower()
    cleaned = re.sub(r"[^a-z0-9._-]", "-", cleaned)
    cleaned = re.sub(r"-+", "-", cleaned).strip("-")
    return cleaned or "report"


def resolve_report_path(
    report: Optional[str],
    source: str,
    output_format: str,
    single_mode: bool = True,
) -> Optional[str]:
    """File for one report, or a timestamped file inside a report directory."""
    if not report:
        return None

    ext = {"json": "json", "dot": "dot"}.get(output_format, "txt")
    base = Path(report)

    if single_mode and (base.suffix or not base.exists()):
        if not base.suffix:
            base = base.with_suffix(f".{ext}")
        return str(base)

    base.mkdir(parents=True, exist_ok=True)
    timestamp = datetime.now(timezone.utc).strftime("%Y%m%d-%H%M%S")
    return str(base / f"{_slugify(source)}-{timestamp}.{ext}")


def write_report(path: Optional[str], rendered: str) -> None:
    if not path:
        return
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(rendered if rendered.endswith("\n") else rendered + "\n")


def mostrar_ajuda() -> None:
    """Print help text with examples."""
    print(
        "\n"
        "REPFREE WORKBENCH - uso\n"
        "\n"
        "Comandos curtos (apos instalar como pacote):\n"
        "  rfw caso.json             -> verifica um arquivo de testemunha\n"
        "  rfc corpus/               -> roda um diretorio de testemunhas\n"
        "\n"
        "Termos e predicados:\n"
        "  repfree parse termo.txt --calc pimpm\n"
        "  repfree visible termo.txt --calc cpg\n"
        "  repfree can termo.txt --calc pi --label \"y!<c>\"\n"
        "  repfree names termo.txt [outro.txt] --calc ccs\n"
        "\n"
        "Espaco de estados e simulacao:\n"
        "  repfree lts termo.txt --calc cows --format dot\n"
        "  repfree sim q.txt p.txt --calc ccs --fix [--gfp]\n"
        "  repfree sim q.txt p.txt --calc ccs --k 3\n"
        "\n"
        "Amostragem aleatoria:\n"
        "  repfree sample --calc ccs --count 1000 --seed 7\n"
        "  repfree sample --calc pimpm --count 500 --closed\n"
        "\n"
        "Flags:\n"
        "  --calc <calculo>             ccs|pi|pimpm|bccsp-theta|cpg|ccs-sg|ccs-prio|cows\n"
        "  --order a<tau,...            ordem de prioridade (bccsp-theta)\n"
        "  --defs arquivo.json          definicoes A<...> (ccs, cpg, ccs-sg, ccs-prio)\n"
        "  --max-states N               limite de estados (padrao: 10000)\n"
        "  --max-depth N                limite de profundidade (padrao: 64)\n"
        "  --max-bang-unfold N          copias por replicacao (padrao: 3)\n"
        "  -o, --format human|json|dot  formato de saida (padrao: human)\n"
        "  -j, --json                   atalho para --format json\n"
        "  -r, --report                 arquivo/pasta de relatorio\n"
        "  -v, --verbose                logs em stderr (-vv para debug)\n"
        "\n"
        "Codigos de saida: 0 ok/vale, 1 negativo, 2 erro de entrada, 3 inconclusivo\n"
    )
