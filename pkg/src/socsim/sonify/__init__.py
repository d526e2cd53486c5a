"""Concatenative granular synthesis: corpus ingestion, event-to-grain
mapping, rendering, and WAV I/O."""

from .corpus import GrainCorpus, crackle_noise, ingest_corpus
from .render import render, soft_limit
from .schedule import (GrainEntry, GrainSchedule, MappingConfig,
                       events_to_schedule, mapping_config_from_dict,
                       schedule_to_jsonl, select_grain)
from .wavio import read_wav, write_wav

__all__ = [
    "GrainCorpus", "GrainEntry", "GrainSchedule", "MappingConfig",
    "crackle_noise", "events_to_schedule", "ingest_corpus",
    "mapping_config_from_dict", "read_wav", "render", "schedule_to_jsonl",
    "select_grain", "soft_limit", "write_wav",
]
