from . import settings
from .ontology import MASTER_DOMAINS, SUB_DOMAINS, OPTIONS
