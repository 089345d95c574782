from typing import Any, Dict, List, Optional

from pydantic import BaseModel


class RunManifest(BaseModel):
    """What was run and what it wrote; replaying argv + config reproduces the files"""
    command_line: str
    config: Dict[str, Any]
    versions: Dict[str, str]
    wall_time: float
    checksums: Dict[str, str]


class CheckResult(BaseModel):
    """One named acceptance check"""
    name: str
    criterion: int
    passed: bool
    value: Optional[float] = None
    threshold: Optional[float] = None
    detail: str = ""


class CertifyReport(BaseModel):
    quick: bool
    passed: bool
    checks: List[CheckResult]
