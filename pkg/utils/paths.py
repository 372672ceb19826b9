"""Per-user locations of the config file and the rotating log."""

import os
import shutil
from pathlib import Path
from typing import Tuple

try:
    from platformdirs import user_data_dir, user_log_dir
except ImportError:
    def user_data_dir(appname: str, appauthor: str = "") -> str:
        return os.path.join(os.path.expanduser("~"), "." + appname.lower())

    def user_log_dir(appname: str, appauthor: str = "") -> str:
        return os.path.join(user_data_dir(appname, appauthor), "logs")

APP_NAME = "TemperedStableToolkit"
APP_VENDOR = "tstoolkit"
HOME_ENV = "TS_HOME"


def resolve_dirs() -> Tuple[Path, Path]:
    """(data dir, log dir); ``TS_HOME`` puts both under one root."""
    home = os.environ.get(HOME_ENV)
    if home:
        root = Path(home).expanduser()
        return root, root / "logs"
    return Path(user_data_dir(APP_NAME, APP_VENDOR)), Path(user_log_dir(APP_NAME, APP_VENDOR))


DATA_DIR, LOG_DIR = resolve_dirs()
CONFIG_PATH = DATA_DIR / "config.yaml"


def init_app_paths() -> None:
    for d in (DATA_DIR, LOG_DIR):
        d.mkdir(parents=True, exist_ok=True)

    # a config.yaml in the working directory seeds the per-user one
    local_config = Path("config.yaml")
    if not CONFIG_PATH.exists() and local_config.is_file():
        shutil.copyfile(local_config, CONFIG_PATH)
