import os
from dotenv import load_dotenv

load_dotenv()


# 日誌配置
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
LOG_FILE = os.getenv("LOG_FILE", "")  # 空字串 = 只輸出到 stderr

# 材料配置
# 電鍍銅的電阻率 (Ω·m)
COPPER_RESISTIVITY = float(os.getenv("COPPER_RESISTIVITY", "1.7e-8"))

# 基板 / 封裝配置
# j_max 以 mA/µm² 表示，載入時轉換為 A/m²
SUBSTRATES = {
    "kapton": {
        "j_max_mA_per_um2": 0.6,
        "description": "Microcoil processed on Kapton film",
    },
    "silicon_on_wafer": {
        "j_max_mA_per_um2": 6.0,
        "description": "Microcoil on the silicon wafer",
    },
    "silicon_to220_glued": {
        # 由 40 匝參考線圈 (w=5 µm, t=10 µm) 的 175 mA 反推
        "j_max_mA_per_um2": 3.5,
        "description": "Silicon die glued on a TO220 support (calibrated)",
    },
}
SUBSTRATES_FILE = os.getenv("SUBSTRATES_FILE", "")  # 額外的基板 JSON 檔

# 製程限制配置
FABRICATION_MIN_TRACK_WIDTH_UM = float(os.getenv("FABRICATION_MIN_TRACK_WIDTH_UM", "5"))
FABRICATION_MIN_SPACING_UM = float(os.getenv("FABRICATION_MIN_SPACING_UM", "5"))
FABRICATION_MAX_THICKNESS_UM = float(os.getenv("FABRICATION_MAX_THICKNESS_UM", "20"))
COIL_OUTER_RADIUS_UM = float(os.getenv("COIL_OUTER_RADIUS_UM", "500"))

# 匝數掃描的線圈族 (R_min = 0.1 mm, R_max = 0.5 mm, w = s)
FAMILY_INNER_RADIUS_UM = float(os.getenv("FAMILY_INNER_RADIUS_UM", "100"))
REFERENCE_TURNS = int(os.getenv("REFERENCE_TURNS", "40"))
REFERENCE_THICKNESS_UM = float(os.getenv("REFERENCE_THICKNESS_UM", "10"))
DEFAULT_SUBSTRATE = os.getenv("DEFAULT_SUBSTRATE", "silicon_to220_glued")

# 封裝情境配置
WAFER_THICKNESS_UM = float(os.getenv("WAFER_THICKNESS_UM", "280"))  # 2 吋晶圓
KAPTON_FILM_UM = float(os.getenv("KAPTON_FILM_UM", "25"))
SCENARIO_SILICON_CURRENT_MA = float(os.getenv("SCENARIO_SILICON_CURRENT_MA", "300"))
SCENARIO_KAPTON_CURRENT_MA = float(os.getenv("SCENARIO_KAPTON_CURRENT_MA", "30"))

# Biot-Savart 離散化配置
DEFAULT_SEGMENTS_PER_TURN = int(os.getenv("DEFAULT_SEGMENTS_PER_TURN", "256"))
DEFAULT_FILAMENTS_PER_TRACK = int(os.getenv("DEFAULT_FILAMENTS_PER_TRACK", "1"))
ORACLE_ANNULUS_FILAMENTS = int(os.getenv("ORACLE_ANNULUS_FILAMENTS", "100000"))
ORACLE_CHUNK_SEGMENTS = int(os.getenv("ORACLE_CHUNK_SEGMENTS", "500000"))  # 每批次計算的線段數
SINGULARITY_GUARD_M = float(os.getenv("SINGULARITY_GUARD_M", "1e-12"))

# 感測器配置 (主動區長度 2 mm)
SENSOR_WINDOW_UM = float(os.getenv("SENSOR_WINDOW_UM", "2000"))
SENSOR_SAMPLES = int(os.getenv("SENSOR_SAMPLES", "64"))

# 側向均勻度：在 x = 0.5 mm 處相對中心值的偏差 (目標 10% 以內)
LATERAL_CHECK_OFFSET_UM = float(os.getenv("LATERAL_CHECK_OFFSET_UM", "500"))
LATERAL_UNIFORMITY_TARGET = float(os.getenv("LATERAL_UNIFORMITY_TARGET", "0.10"))

# 輸出配置
OUTPUT_SIGNIFICANT_DIGITS = int(os.getenv("OUTPUT_SIGNIFICANT_DIGITS", "9"))
SEARCH_WORKERS = int(os.getenv("SEARCH_WORKERS", "4"))
