"""
실행 매니페스트 (설정 + 시드 + 빌드 ID, 타임스탬프 없음)
"""
import json
import logging
import subprocess
from pathlib import Path
from typing import Dict, Optional, Union

from .. import __version__
from ..config import settings
from ..config.experiment import ExperimentConfig

logger = logging.getLogger(__name__)


def build_id() -> str:
    """git describe 결과, 없으면 패키지 버전"""
    try:
        result = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            capture_output=True, text=True, timeout=5,
            cwd=Path(__file__).resolve().parent,
        )
        if result.returncode == 0 and result.stdout.strip():
            return result.stdout.strip()
    except (OSError, subprocess.SubprocessError) as e:
        logger.debug(f"git describe unavailable: {e}")
    return f"hrl_dialog-{__version__}"


def write_manifest(
    out_dir: Union[str, Path],
    config: ExperimentConfig,
    command: str,
    extra: Optional[Dict] = None,
) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = {
        "format_version": settings.FORMAT_VERSION,
        "command": command,
        "build_id": build_id(),
        "seeds": config.experiment.seeds,
        "dictionary_cap": config.gp.dictionary_cap,
        "config": config.model_dump(mode="json"),
    }
    if extra:
        manifest.update(extra)
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True), encoding="utf-8")
    return path
