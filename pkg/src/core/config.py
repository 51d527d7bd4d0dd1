import os
from dotenv import load_dotenv

# Load environment variables
load_dotenv()


class Settings:
    # API Settings
    API_V1_STR: str = "/api/v1"
    PROJECT_NAME: str = "Matsumoto Graphs API"
    VERSION: str = "1.0.0"
    API_HOST: str = os.getenv("API_HOST", "0.0.0.0")
    API_PORT: int = int(os.getenv("API_PORT", 8002))

    # Float backend tolerance for cone tests and linear-solve residuals
    MK_TOL: float = float(os.getenv("MK_TOL", 1e-9))

    # Decimal digits kept when forming float ray keys
    MK_KEY_DIGITS: int = int(os.getenv("MK_KEY_DIGITS", 12))

    # Window radius used when a generator is called without one
    MK_DEFAULT_RADIUS: int = int(os.getenv("MK_DEFAULT_RADIUS", 12))

    # Enumeration limits
    MK_PATH_LIMIT: int = int(os.getenv("MK_PATH_LIMIT", 10000))
    MK_BRAID_CAP: int = int(os.getenv("MK_BRAID_CAP", 100000))
    MK_CERT_MEMO: int = int(os.getenv("MK_CERT_MEMO", 50000))

    # Logging
    MK_LOG_LEVEL: str = os.getenv("MK_LOG_LEVEL", "WARNING")


settings = Settings()
