"""Process-level settings read from the environment"""
import os
from dotenv import load_dotenv

# Load environment variables
load_dotenv()


def get_workers():
    """Number of parallel trial workers (DLT_WORKERS, default 1)"""
    return int(os.getenv("DLT_WORKERS", "1"))


def get_default_seed():
    """Master seed used when neither config nor CLI gives one (DLT_SEED, default 1)"""
    return int(os.getenv("DLT_SEED", "1"))


def get_output_dir():
    """Directory for relative output paths in interactive mode (DLT_OUTPUT_DIR)"""
    return os.getenv("DLT_OUTPUT_DIR", "results")
