"""
Configuration manager for the toolkit.

This module provides functionality for loading and managing
numeric configuration settings from environment variables and a .env file.
"""

import os
from typing import Dict, Any
from dotenv import load_dotenv
from src.utils.logger import setup_logger

logger = setup_logger("config")

DEFAULT_TOL = 1e-10


class Config:
    """
    Manages toolkit configuration.
    
    Responsibilities:
    - Load environment variables
    - Provide default values
    - Validate configuration
    - Access configuration values
    """
    
    def __init__(self):
        """Initialize the configuration manager"""
        load_dotenv()
        
        # Comparison tolerance used by PSD tests and equivalence checks
        self.tol = float(os.getenv("QFOCK_TOL", str(DEFAULT_TOL)))
        
        # Series reconstruction and eigen-solver limits
        self.series_terms = int(os.getenv("QFOCK_SERIES_TERMS", "40"))
        self.jacobi_max_sweeps = int(os.getenv("QFOCK_JACOBI_MAX_SWEEPS", "100"))
        
        # Random witness search
        self.witness_trials = int(os.getenv("QFOCK_WITNESS_TRIALS", "200"))
        
        self.log_level = os.getenv("QFOCK_LOG_LEVEL", "WARNING")
    
    def validate(self) -> bool:
        """
        Validate the configuration.
        
        Returns:
            True if configuration is valid
        """
        problems = []
        if not 0.0 < self.tol < 1e-2:
            problems.append(f"QFOCK_TOL={self.tol}")
        if not 1 <= self.series_terms <= 60:
            problems.append(f"QFOCK_SERIES_TERMS={self.series_terms}")
        if self.jacobi_max_sweeps < 1:
            problems.append(f"QFOCK_JACOBI_MAX_SWEEPS={self.jacobi_max_sweeps}")
        if self.witness_trials < 1:
            problems.append(f"QFOCK_WITNESS_TRIALS={self.witness_trials}")
        
        if problems:
            logger.warning(f"Out-of-range configuration values: {', '.join(problems)}")
            return False
        
        return True
    
    def get_numeric_config(self) -> Dict[str, Any]:
        """Get numeric configuration"""
        return {
            "tol": self.tol,
            "series_terms": self.series_terms,
            "jacobi_max_sweeps": self.jacobi_max_sweeps,
            "witness_trials": self.witness_trials,
        }
