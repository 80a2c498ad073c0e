"""Application settings and configuration"""
from functools import lru_cache
from typing import Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class PrecisionSettings(BaseSettings):
    """Working precision configuration settings"""
    model_config = SettingsConfigDict(env_prefix='PRECISION_')

    default_bits: int = Field(default=192, description='Default working precision in bits')
    min_bits: int = Field(default=64, description='Smallest accepted precision')
    max_bits: int = Field(default=4096, description='Largest accepted precision')
    guard_bits: int = Field(default=20, description='Extra bits carried by every computation')


class LatticeSettings(BaseSettings):
    """Eisenstein-Kronecker lattice sum settings"""
    model_config = SettingsConfigDict(env_prefix='EK_')

    split_scale: float = Field(default=1.0, description='Mellin split point in units of 1/covolume')
    alt_split_scale: float = Field(default=1.37, description='Second split point for the independence check')
    max_points: int = Field(default=2_000_000, description='Largest lattice point count per evaluation')
    direct_radius: float = Field(default=60.0, description='Default truncation radius of the direct sum')


class ArithmeticSettings(BaseSettings):
    """Exact arithmetic limits"""
    model_config = SettingsConfigDict(env_prefix='ARITH_')

    max_unit_residues: int = Field(default=1_000_000, description='Largest |(O/f)^x| handled by brute force')
    max_group_order: int = Field(default=64, description='Largest Galois group order')
    max_class_number: int = Field(default=2, description='Largest class number handled')


class LValueSettings(BaseSettings):
    """L-value computation settings"""
    model_config = SettingsConfigDict(env_prefix='LVALUE_')

    dirichlet_nmax: int = Field(default=10_000, description='Default norm bound of the Dirichlet oracle')


class RecognitionSettings(BaseSettings):
    """Algebraic recognition settings"""
    model_config = SettingsConfigDict(env_prefix='RECOGNITION_')

    max_degree: int = Field(default=4, description='Largest polynomial degree tried')
    max_height: int = Field(default=10**8, description='Largest accepted coefficient')
    stability_factor: float = Field(default=1.5, description='Precision factor of the stability rerun')


class OutputSettings(BaseSettings):
    """Report and golden data locations"""
    model_config = SettingsConfigDict(env_prefix='OUTPUT_')

    golden_dir: str = Field(default='golden', description='Directory of golden value files')
    report_path: Optional[str] = Field(default=None, description='Default JSON report path')


class LogSettings(BaseSettings):
    """Logging configuration settings"""
    model_config = SettingsConfigDict(env_prefix='LOG_')

    log_level: str = Field(default='INFO', description='Logging level')


class Settings(BaseSettings):
    """Main application settings"""
    model_config = SettingsConfigDict(
        env_file='.env',
        env_file_encoding='utf-8',
        case_sensitive=False,
        extra='ignore'
    )

    precision: PrecisionSettings = Field(default_factory=PrecisionSettings)
    lattice: LatticeSettings = Field(default_factory=LatticeSettings)
    arithmetic: ArithmeticSettings = Field(default_factory=ArithmeticSettings)
    lvalue: LValueSettings = Field(default_factory=LValueSettings)
    recognition: RecognitionSettings = Field(default_factory=RecognitionSettings)
    output: OutputSettings = Field(default_factory=OutputSettings)
    log: LogSettings = Field(default_factory=LogSettings)


@lru_cache
def get_settings() -> Settings:
    """Get settings instance (singleton pattern)"""
    return Settings()


# Export singleton instance
settings = get_settings()
