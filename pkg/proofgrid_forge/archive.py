"""
Result Archives

Reads and writes the per-task YAML result files: a list of result
dictionaries, one per benchmark item, keyed by a numeric `index`.

Persisted per record:
- problem text and gold artifacts (proof, maskedProof, masks, gaps, ...)
- metadata flags (conditionalized, correctProof, complexProof)
- per-model responses under a `...Responses` key (timestamps, answer,
  evaluation details)

Keys this tool does not know are kept verbatim. Evaluation results are
written under each response's `forge` sub-dict so they never collide with
released fields.

Usage:
    task, records = load_archive('PL1-PM.yaml')
    save_archive(records, 'PL1-PM.scored.yaml')
"""

import logging
import os
import re
from dataclasses import dataclass
from datetime import datetime
from typing import Dict, List, Optional, Sequence, Tuple

import pytz
import yaml

try:
    from .config import ARCHIVE_NAMESPACE, TASK_IDS, TIMESTAMP_FORMAT, TIMEZONE
    from .errors import SchemaError
except ImportError:
    from config import ARCHIVE_NAMESPACE, TASK_IDS, TIMESTAMP_FORMAT, TIMEZONE
    from errors import SchemaError

logger = logging.getLogger(__name__)
TZ = pytz.timezone(TIMEZONE)

RESPONSES_SUFFIX = 'Responses'

# Flags marking answers that came back but could not be read
ILL_FORMATTED_FLAGS = ('illFormattedResponse', 'illFormattedProofOutput', 'illFormattedAnswer')
API_FAILURE_FLAGS = ('apiCallFailure', 'apiFailure')


@dataclass
class ResultRecord:
    """
    One archived item

    `data` is the full record dictionary as stored; the properties below are
    read-only views of the released field names.
    """
    data: Dict
    position: int = 0

    @property
    def index(self) -> int:
        return self.data['index']

    @property
    def problem(self) -> Optional[str]:
        return self.data.get('problem')

    @property
    def responses_key(self) -> Optional[str]:
        for key, value in self.data.items():
            if isinstance(key, str) and key.endswith(RESPONSES_SUFFIX) and isinstance(value, dict):
                return key
        return None

    @property
    def responses(self) -> Dict[str, Optional[Dict]]:
        """model id -> response dict (None for a bare entry)"""
        key = self.responses_key
        return self.data[key] if key else {}

    def flag(self, name: str, default: bool = False) -> bool:
        return bool(self.data.get(name, default))

    def to_dict(self) -> Dict:
        return self.data


def task_from_path(path: str) -> Optional[str]:
    """Task id named in a file name (PL1-PC-c before PL1-PC), or None"""
    name = os.path.basename(path).upper().replace('_', '-')
    for task in sorted(TASK_IDS, key=len, reverse=True):
        if re.search(rf'(?<![A-Z0-9]){re.escape(task.upper())}(?![A-Z0-9])', name):
            return task
    return None


def _validate(raw, source: str) -> List[ResultRecord]:
    if raw is None:
        return []
    if not isinstance(raw, list):
        raise SchemaError(f"{source}: an archive is a list of result records, got {type(raw).__name__}")

    records = []
    seen = set()
    for position, item in enumerate(raw):
        if not isinstance(item, dict):
            raise SchemaError(f"{source}: record {position} is not a mapping", index=position)
        if 'index' not in item:
            raise SchemaError(f"{source}: record {position} has no index", index=position, key='index')
        index = item['index']
        if not isinstance(index, int) or isinstance(index, bool):
            raise SchemaError(f"{source}: record {position} has a non-integer index {index!r}",
                              index=position, key='index')
        if index in seen:
            raise SchemaError(f"{source}: duplicate index {index}", index=index, key='index')
        seen.add(index)

        for key, value in item.items():
            if isinstance(key, str) and key.endswith(RESPONSES_SUFFIX):
                if not isinstance(value, dict):
                    raise SchemaError(f"{source}: record {index} key {key} must map model ids to responses",
                                      index=index, key=key)
                for model, response in value.items():
                    if response is not None and not isinstance(response, dict):
                        raise SchemaError(f"{source}: record {index} response of {model} is not a mapping",
                                          index=index, key=key)
        records.append(ResultRecord(item, position))
    return records


def load_archive(path: str) -> Tuple[Optional[str], List[ResultRecord]]:
    """
    Load a YAML result file

    Returns:
        (task id inferred from the file name or None, records)

    Raises:
        SchemaError: On unparseable YAML or records that break the layout
    """
    try:
        with open(path, 'r', encoding='utf-8') as f:
            raw = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise SchemaError(f"{path}: not valid YAML: {e}")

    records = _validate(raw, path)
    task = task_from_path(path)
    logger.info(f"[ARCHIVE] Loaded {len(records)} records from {path} (task {task or 'unknown'})")
    return task, records


def parse_archive(text: str, source: str = '<string>') -> List[ResultRecord]:
    """Validate archive text already in memory"""
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise SchemaError(f"{source}: not valid YAML: {e}")
    return _validate(raw, source)


class _ArchiveDumper(yaml.SafeDumper):
    """Multi-line strings (proofs) as literal blocks, like the released files"""


def _str_presenter(dumper, data):
    if '\n' in data:
        return dumper.represent_scalar('tag:yaml.org,2002:str', data, style='|')
    return dumper.represent_scalar('tag:yaml.org,2002:str', data)


_ArchiveDumper.add_representer(str, _str_presenter)


def dump_archive(records: Sequence) -> str:
    data = [r.to_dict() if isinstance(r, ResultRecord) else r for r in records]
    return yaml.dump(data, Dumper=_ArchiveDumper, sort_keys=False, default_flow_style=False,
                     allow_unicode=True)


def save_archive(records: Sequence, path: str):
    """
    Write records (ResultRecord or plain dicts) as a YAML result file

    Raises:
        SchemaError: If the records would not load back
    """
    text = dump_archive(records)
    _validate(yaml.safe_load(text), path)
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        f.write(text)
    logger.info(f"[ARCHIVE] Saved {len(records)} records to {path}")


def timestamp() -> str:
    """Current time in the archive timestamp format"""
    return datetime.now(TZ).strftime(TIMESTAMP_FORMAT)


def forge_stamp(credited: Optional[bool], error_type, normalization: Sequence[str] = ()) -> Dict:
    """The sub-dict written under `forge` for one evaluated response"""
    return {
        'credited': credited,
        'errorType': error_type,
        'evaluationTimestamp': timestamp(),
        'normalization': list(normalization),
    }


def attach_outcome(record: ResultRecord, model: str, stamp: Dict):
    """Store an evaluation stamp in a model's response"""
    responses = record.responses
    if responses.get(model) is None:
        responses[model] = {}
    responses[model][ARCHIVE_NAMESPACE] = stamp
