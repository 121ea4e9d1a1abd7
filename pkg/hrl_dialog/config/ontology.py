"""
도메인 온톨로지 (슬롯 및 값 집합)
"""
from typing import Dict, List

# =============================================================================
# 마스터 도메인
# =============================================================================

MASTER_DOMAINS: Dict[str, Dict] = {
    # 레스토랑 (약 100곳, 검색 제약 3개)
    "restaurant": {
        "entity_count": 100,
        "constraint_slots": {
            "pricerange": ["cheap", "moderate", "expensive"],
            "area": ["centre", "north", "south", "east", "west"],
            "food": ["british", "chinese", "indian", "italian", "french", "thai"],
        },
        "requestable_slots": ["name", "phone", "address"],
        "options": ["book", "pay"],
    },

    # 호텔 (33곳, 속성 5개)
    "hotel": {
        "entity_count": 33,
        "constraint_slots": {
            "pricerange": ["cheap", "moderate", "expensive"],
            "kind": ["hotel", "guesthouse"],
            "stars": ["0", "1", "2", "3", "4"],
            "hasparking": ["yes", "no"],
            "area": ["centre", "north", "south", "east", "west"],
        },
        "requestable_slots": ["name", "price", "phone", "address", "postcode"],
        "options": ["book", "pay"],
    },
}

# =============================================================================
# 서브 도메인 (두 마스터 도메인이 공유)
# =============================================================================

SUB_DOMAINS: Dict[str, Dict] = {
    # 예약: 시스템이 물어볼 수 있는 슬롯 5개 (entityname은 마스터에서 전달)
    "booking": {
        "constraint_slots": {
            "hour": ["10am", "12pm", "2pm", "4pm", "6pm", "8pm"],
            "peopleno": ["1", "2", "3", "4", "5", "6", "7", "8"],
            "durationdays": ["1", "2", "3", "4", "5", "6", "7"],
            "day": ["monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday"],
            "entityname": [],
        },
        "dontcare_slots": ["day"],
        "initiation_slot": "peopleno",
    },

    # 결제: 제약 슬롯 3개
    "payment": {
        "constraint_slots": {
            "amount": ["20", "50", "100", "150", "200"],
            "method": ["card", "cash", "voucher"],
            "cardnumber": ["1111", "2222", "3333", "4444"],
        },
        "dontcare_slots": [],
        "initiation_slot": "amount",
    },
}

# =============================================================================
# 옵션 → 서브 도메인 매핑
# =============================================================================

OPTIONS: Dict[str, str] = {
    "book": "booking",
    "pay": "payment",
}

# 런타임에 결정되는 슬롯 (제공된 엔티티 이름)
RUNTIME_BOUND_SLOTS: List[str] = ["entityname"]
BOUND_VALUE = "bound"

DONTCARE = "dontcare"
NONE = "none"


def option_for(sub_domain: str) -> str:
    """서브 도메인을 호출하는 옵션 이름"""
    for option, target in OPTIONS.items():
        if target == sub_domain:
            return option
    raise KeyError(f"no option targets sub-domain '{sub_domain}'")
