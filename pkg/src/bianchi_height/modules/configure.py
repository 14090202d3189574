import os
import json
import logging

logger = logging.getLogger(__name__)


def verify_default_config(path, default_content=None):
    """
    Writes the default JSON configuration at path when no file exists there,
    creating the intermediate directories.
    """
    if not os.path.exists(path):
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(default_content or {}, f, ensure_ascii=False, indent=4)
        logger.info("wrote default configuration to %s", path)


def merge_defaults(config, defaults):
    """
    Adds the default values missing from config.
    Recurses into nested dictionaries.
    """
    for key, value in defaults.items():
        if key not in config:
            config[key] = value
        elif isinstance(value, dict) and isinstance(config[key], dict):
            merge_defaults(config[key], value)
    return config


def load_config(config_path, default_content=None):
    """
    Loads the JSON configuration and fills in the defaults it lacks.
    A corrupt file is reported and replaced by the defaults.
    """
    config = {}
    if os.path.exists(config_path):
        with open(config_path, 'r', encoding='utf-8') as f:
            try:
                config = json.load(f)
            except json.JSONDecodeError:
                logger.warning("could not read configuration %s, using defaults", config_path)
                config = {}
        if not isinstance(config, dict):
            logger.warning("configuration %s is not a JSON object, using defaults", config_path)
            config = {}

    if default_content:
        config = merge_defaults(config, default_content)

    return config


def save_config(path, content):
    """
    Writes content as JSON at path, creating the intermediate directories.
    """
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(content, f, ensure_ascii=False, indent=4)
