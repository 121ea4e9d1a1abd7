"""
합성 엔티티 DB 생성/조회
"""
import itertools
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Mapping, Union

import numpy as np
import pandas as pd

from ..config import settings
from ..config.ontology import DONTCARE, MASTER_DOMAINS
from ..core.errors import DatabaseError, FormatVersionError
from .domain import DomainSpec, master_spec

logger = logging.getLogger(__name__)

_STREETS = ["regent", "mill", "trumpington", "hills", "king", "bridge", "market", "station", "newmarket", "castle"]
_NAME_WORDS = ["golden", "river", "garden", "royal", "little", "old", "green", "silver", "blue", "city"]
_NAME_NOUNS = {"restaurant": "kitchen", "hotel": "lodge"}
_PRICES = {"cheap": (40, 70), "moderate": (70, 120), "expensive": (120, 250)}


@dataclass
class EntityDB:
    """엔티티 DB (이름순 정렬된 DataFrame)"""
    domain: str
    seed: int
    table: pd.DataFrame

    @property
    def entities(self) -> List[Dict[str, str]]:
        return self.table.to_dict("records")

    def __len__(self):
        return len(self.table)

    def find(self, name: str) -> Dict[str, str]:
        rows = self.table[self.table["name"] == name]
        if rows.empty:
            raise DatabaseError(f"{self.domain}: no entity named '{name}'")
        return rows.iloc[0].to_dict()


def generate_database(spec: DomainSpec, seed: int) -> EntityDB:
    """
    시드 기반 DB 생성

    전체 조합 수가 엔티티 수 이하이면 모든 조합을 포함하고, 아니면 슬롯별로 모든 값이
    최소 한 번 등장하도록 채운다.
    """
    n = spec.entity_count
    if n <= 0:
        raise DatabaseError(f"{spec.id}: entity_count must be positive")
    for slot, values in spec.constraint_slots.items():
        if not values:
            raise DatabaseError(f"{spec.id}: slot '{slot}' has an empty value set")
        if len(values) > n:
            raise DatabaseError(
                f"{spec.id}: slot '{slot}' has {len(values)} values but only {n} entities"
            )

    rng = np.random.default_rng(seed)
    slots = list(spec.constraint_slots)
    value_sets = [spec.constraint_slots[s] for s in slots]
    n_combos = int(np.prod([len(v) for v in value_sets]))

    if n_combos <= n:
        # 전체 조합 + 무작위 추가
        rows = [dict(zip(slots, combo)) for combo in itertools.product(*value_sets)]
        for _ in range(n - n_combos):
            rows.append({s: str(rng.choice(v)) for s, v in zip(slots, value_sets)})
    else:
        # 슬롯별 주변 분포 커버리지
        columns = {}
        for slot, values in zip(slots, value_sets):
            tiled = np.resize(np.array(values), n)
            columns[slot] = rng.permutation(tiled)
        rows = [{s: str(columns[s][i]) for s in slots} for i in range(n)]

    order = rng.permutation(n)
    noun = _NAME_NOUNS.get(spec.id, spec.id)
    entities = []
    for idx, i in enumerate(order):
        row = dict(rows[i])
        row["name"] = f"{_NAME_WORDS[idx % len(_NAME_WORDS)]} {noun} {idx:03d}"
        row.update(_contact_details(spec, row, rng))
        entities.append(row)

    table = pd.DataFrame(entities)
    columns = ["name"] + slots + [c for c in table.columns if c not in slots and c != "name"]
    table = table[columns].sort_values("name", kind="mergesort").reset_index(drop=True)
    logger.debug(f"Generated {spec.id} DB: {len(table)} entities (seed={seed})")
    return EntityDB(domain=spec.id, seed=seed, table=table)


def _contact_details(spec: DomainSpec, row: Dict[str, str], rng: np.random.Generator) -> Dict[str, str]:
    """요청 슬롯 값 (이름 제외)"""
    details = {}
    for slot in spec.requestable_slots:
        if slot == "name":
            continue
        if slot == "phone":
            details[slot] = f"01223 {int(rng.integers(100000, 999999))}"
        elif slot == "address":
            details[slot] = f"{int(rng.integers(1, 120))} {_STREETS[int(rng.integers(len(_STREETS)))]} street"
        elif slot == "postcode":
            details[slot] = f"cb{int(rng.integers(1, 6))} {int(rng.integers(1, 10))}{chr(97 + int(rng.integers(26)))}{chr(97 + int(rng.integers(26)))}"
        elif slot == "price":
            low, high = _PRICES.get(row.get("pricerange", "moderate"), (50, 150))
            details[slot] = f"{int(rng.integers(low, high))} pounds"
        else:
            details[slot] = f"{slot} {int(rng.integers(1000))}"
    return details


def db_query(db: EntityDB, constraints: Mapping[str, str]) -> List[Dict[str, str]]:
    """dontcare 가 아닌 모든 제약을 만족하는 엔티티 (이름순)"""
    table = db.table
    mask = pd.Series(True, index=table.index)
    for slot, value in constraints.items():
        if slot not in table.columns or slot == "name":
            raise DatabaseError(f"{db.domain}: unknown slot '{slot}'")
        if value == DONTCARE:
            continue
        mask &= table[slot] == value
    return table[mask].to_dict("records")


def matches(entity: Mapping[str, str], constraints: Mapping[str, str]) -> bool:
    """엔티티가 제약을 만족하는지 (dontcare 는 항상 만족)"""
    return all(v == DONTCARE or entity.get(s) == v for s, v in constraints.items())


def generate_databases(seed: int = settings.EXPERIMENT["db_seed"]) -> Dict[str, EntityDB]:
    """모든 마스터 도메인 DB"""
    return {d: generate_database(master_spec(d), seed) for d in MASTER_DOMAINS}


# =============================================================================
# 온톨로지 + DB 파일
# =============================================================================

def save_ontology_db(path: Union[str, Path], dbs: Mapping[str, EntityDB]) -> Path:
    """온톨로지와 DB 를 JSON 으로 저장"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "format_version": settings.FORMAT_VERSION,
        "domains": {d: master_spec(d).model_dump(mode="json") for d in dbs},
        "databases": {
            d: {"seed": db.seed, "entities": db.entities} for d, db in dbs.items()
        },
    }
    path.write_text(json.dumps(payload, indent=2, ensure_ascii=False), encoding="utf-8")
    logger.info(f"Wrote ontology and {len(dbs)} databases to {path}")
    return path


def load_ontology_db(path: Union[str, Path]) -> Dict[str, EntityDB]:
    """JSON 파일에서 DB 로드"""
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    version = payload.get("format_version")
    if version != settings.FORMAT_VERSION:
        raise FormatVersionError(f"{path}: format version {version}, expected {settings.FORMAT_VERSION}")

    dbs = {}
    for domain, data in payload["databases"].items():
        spec = DomainSpec(**payload["domains"][domain])
        table = pd.DataFrame(data["entities"], dtype=str)
        columns = ["name"] + list(spec.constraint_slots)
        columns += [c for c in table.columns if c not in columns]
        dbs[domain] = EntityDB(domain=domain, seed=int(data["seed"]), table=table[columns])
    return dbs
