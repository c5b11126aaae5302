"""
系統常數定義
"""

# 內建有限體（q -> 特徵值與擴張次數）
SUPPORTED_FIELDS = {
    2: (2, 1),
    3: (3, 1),
    4: (2, 2),   # GF(4) = F2[a]/(a^2 + a + 1)
    5: (5, 1),
}

# 內建範疇的大小上限
MAX_VECT_DIMENSION = 4
MAX_POINTED_SET_SIZE = 5
MAX_ZERO_OBJECTS = 6

# 建構的層級上限
MAX_ITERATED_ARITY = 2
MAX_ITERATED_LEVEL = 3
MAX_TEMPLATE_ARITY = 3
MAX_TEMPLATE_LEVEL = 3

# 非單純性見證的搜尋層級
SEQ_WITNESS_MIN_LEVEL = 3
SEQ_WITNESS_MAX_LEVEL = 4

# 報告
REPORT_SCHEMA_VERSION = "1.0"
HOM_ORDER = "identity-first, then lexicographic"

# 2-Segal 族的方向慣例（見 DESIGN.md）
LOWER_FAMILY_CONVENTION = "diagonals (0, j); at n=3 the map (d1, d3)"
UPPER_FAMILY_CONVENTION = "diagonals (i, n); at n=3 the map (d2, d0)"

# CLI 結束碼
EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIGURATION = 2
EXIT_CONSTRUCTION = 3

# Fixtures
NEGATIVE_CONTROL_FIXTURE = "semi_stable_negative_control"

# 每種建構可接受的最大層級（JobSpec 驗證）
LEVEL_BUDGET = {
    "seq": 4,
    "s": 5,
    "s2": 3,
    "sigma-s": 4,
    "esd": 5,
    "nerve": 5,
}

# 點化／穩定性檢查使用的正合神經截斷
SIGMA_CHECK_BOUND = 3
