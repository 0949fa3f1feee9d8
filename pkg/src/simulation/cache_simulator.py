"""
Two-level data cache model
Classifies every floating-point memory access into an operand-source category

The hierarchy is inclusive, write-allocate and LRU in both levels. A miss in
L2 fills both levels; an L2 eviction back-invalidates the line in L1.
"""

from collections import OrderedDict
from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..utils.config import (
    CACHE_L1_ASSOC, CACHE_L1_SIZE, CACHE_L2_ASSOC, CACHE_L2_SIZE, CACHE_LINE_SIZE
)
from ..utils.logger import get_logger

logger = get_logger(__name__)


class OperandCategory(str, Enum):
    """Instruction categories by operand source, in EPI table order"""

    RF = "rf"
    L1 = "l1"
    L2 = "l2"
    MEM_RD = "mem_rd"
    MEM_WR = "mem_wr"

    @property
    def position(self) -> int:
        return CATEGORY_ORDER.index(self)


CATEGORY_ORDER: List[OperandCategory] = list(OperandCategory)


class CacheConfig(BaseModel):
    """
    Geometry of the L1/L2 data caches (bytes and way counts)
    """

    l1_size: int = Field(CACHE_L1_SIZE, gt=0, description="L1 data cache capacity in bytes")
    l2_size: int = Field(CACHE_L2_SIZE, gt=0, description="L2 data cache capacity in bytes")
    line_size: int = Field(CACHE_LINE_SIZE, gt=0, description="Cache line size in bytes")
    l1_assoc: int = Field(CACHE_L1_ASSOC, gt=0, description="L1 ways per set")
    l2_assoc: int = Field(CACHE_L2_ASSOC, gt=0, description="L2 ways per set")

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check_geometry(self) -> "CacheConfig":
        if self.l1_size % (self.line_size * self.l1_assoc):
            raise ValueError("l1_size must be divisible by line_size * l1_assoc")
        if self.l2_size % (self.line_size * self.l2_assoc):
            raise ValueError("l2_size must be divisible by line_size * l2_assoc")
        if self.l2_size <= self.l1_size:
            raise ValueError("l2_size must be larger than l1_size")
        return self

    @property
    def l1_sets(self) -> int:
        return self.l1_size // (self.line_size * self.l1_assoc)

    @property
    def l2_sets(self) -> int:
        return self.l2_size // (self.line_size * self.l2_assoc)


class CacheLevel:
    """
    One set-associative level with LRU replacement

    Each set is an OrderedDict of resident line numbers; the first entry is
    the least recently used.
    """

    def __init__(self, num_sets: int, assoc: int):
        self.num_sets = num_sets
        self.assoc = assoc
        self.sets: List["OrderedDict[int, None]"] = [OrderedDict() for _ in range(num_sets)]

    def _set_of(self, line: int) -> "OrderedDict[int, None]":
        return self.sets[line % self.num_sets]

    def lookup(self, line: int) -> bool:
        """Return True on hit and mark the line most recently used"""
        ways = self._set_of(line)
        if line in ways:
            ways.move_to_end(line)
            return True
        return False

    def fill(self, line: int) -> Optional[int]:
        """Insert a line as most recently used, returning the evicted line if any"""
        ways = self._set_of(line)
        victim = None
        if len(ways) >= self.assoc:
            victim, _ = ways.popitem(last=False)
        ways[line] = None
        return victim

    def invalidate(self, line: int) -> None:
        self._set_of(line).pop(line, None)

    def contains(self, line: int) -> bool:
        return line in self._set_of(line)

    def resident_lines(self) -> List[int]:
        return [line for ways in self.sets for line in ways]

    def clear(self) -> None:
        for ways in self.sets:
            ways.clear()


class CacheSimulator:
    """
    Inclusive L1/L2 data cache returning the operand category of each access
    """

    def __init__(self, config: Optional[CacheConfig] = None):
        """
        Initialize CacheSimulator

        Args:
            config: Cache geometry (defaults to 32KB L1 / 512KB L2)
        """
        self.config = config or CacheConfig()
        self.l1 = CacheLevel(self.config.l1_sets, self.config.l1_assoc)
        self.l2 = CacheLevel(self.config.l2_sets, self.config.l2_assoc)
        self.stats: Dict[OperandCategory, int] = {}
        self.reset()

        logger.debug(
            f"CacheSimulator initialized: L1 {self.config.l1_size}B/{self.config.l1_assoc}-way, "
            f"L2 {self.config.l2_size}B/{self.config.l2_assoc}-way, line {self.config.line_size}B"
        )

    def reset(self) -> None:
        """Clear all cache state and statistics"""
        self.l1.clear()
        self.l2.clear()
        self.stats = {category: 0 for category in CATEGORY_ORDER}

    def access(self, addr: int, is_write: bool = False) -> OperandCategory:
        """
        Simulate one data access

        Args:
            addr: Byte address
            is_write: Whether the access is a store

        Returns:
            L1 on L1 hit, L2 on L2 hit, MEM_RD / MEM_WR on a miss to memory
        """
        line = int(addr) // self.config.line_size

        if self.l1.lookup(line):
            # L2 recency follows L1 hits
            self.l2.lookup(line)
            category = OperandCategory.L1
        elif self.l2.lookup(line):
            self.l1.fill(line)
            category = OperandCategory.L2
        else:
            victim = self.l2.fill(line)
            if victim is not None:
                self.l1.invalidate(victim)
            self.l1.fill(line)
            category = OperandCategory.MEM_WR if is_write else OperandCategory.MEM_RD

        self.stats[category] += 1
        return category

    def audit_inclusion(self) -> bool:
        """True iff every line resident in L1 is also resident in L2"""
        return all(self.l2.contains(line) for line in self.l1.resident_lines())
