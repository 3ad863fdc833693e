from alpipe.data.arff import parse_arff, serialize_arff
from alpipe.data.csvtab import infer_kinds, parse_csv
from alpipe.data.openml import fetch_openml
from alpipe.data.preprocess import PreprocessModel, apply_preprocess, fit_preprocess
from alpipe.data.tables import Column, RawTable, table_to_dataset

__all__ = [
    "Column",
    "RawTable",
    "PreprocessModel",
    "parse_arff",
    "serialize_arff",
    "parse_csv",
    "infer_kinds",
    "fetch_openml",
    "fit_preprocess",
    "apply_preprocess",
    "table_to_dataset",
]
