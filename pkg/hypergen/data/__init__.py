from .csv_task import CsvSchema, load_csv_task
from .dataset import AccessLog, Dataset, build_dataset, split_indices, standardize
from .synthetic import BlobSpec, make_blob_task, make_synthetic_suite
