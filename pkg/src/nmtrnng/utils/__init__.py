from .integrity import calculate_checksum
from .logger import logger, parse_record
from .system_info import SystemInfo

__all__ = ['calculate_checksum', 'logger', 'parse_record', 'SystemInfo']
