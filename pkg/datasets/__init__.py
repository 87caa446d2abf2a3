# Datasets package: builtin worked examples and CSV loading
from .builtin import BuiltinDataset, eight_schools, get_builtin, hospital_27, list_builtins
from .loader import load_dataset

__all__ = [
    'BuiltinDataset', 'eight_schools', 'get_builtin', 'hospital_27', 'list_builtins',
    'load_dataset',
]
