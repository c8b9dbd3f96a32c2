from .composer import PromptSpecError, compose, config_matrix, get_config, validate_spec
