from app.config.config import BaseConfig, DevConfig, ProdConfig, TestConfig, get_settings

__all__ = ["BaseConfig", "DevConfig", "ProdConfig", "TestConfig", "get_settings"]
