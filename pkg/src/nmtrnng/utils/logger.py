import logging
import os
import threading


class NmtRnngLogger:
    _instance = None
    _lock = threading.Lock()

    def __new__(cls):
        if cls._instance is None:
            with cls._lock:
                if cls._instance is None:
                    cls._instance = super().__new__(cls)
        return cls._instance

    def __init__(self):
        if not hasattr(self, 'initialized'):
            self.initialized = True
            self.records_path = None
            self._records_lock = threading.Lock()
            self.setup_logger()

    def setup_logger(self):
        """Setup logging configuration"""
        self.logger = logging.getLogger('nmtrnng')
        self.logger.setLevel(logging.DEBUG)
        self.logger.propagate = False

        for handler in self.logger.handlers[:]:
            self.logger.removeHandler(handler)

        # Console handler for important messages only
        console_handler = logging.StreamHandler()
        console_handler.setLevel(logging.WARNING)
        console_handler.setFormatter(self._formatter())
        self.logger.addHandler(console_handler)

    @staticmethod
    def _formatter():
        return logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        )

    def attach_file(self, log_file):
        """
        Send every message (DEBUG and up) to a log file as well

        Args:
            log_file (str): Path of the log file, parent directories are created

        Returns:
            logging.Handler: The handler, so callers can detach it again
        """
        os.makedirs(os.path.dirname(os.path.abspath(log_file)), exist_ok=True)
        file_handler = logging.FileHandler(log_file, encoding='utf-8')
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(self._formatter())
        self.logger.addHandler(file_handler)
        self.logger.info(f"nmtrnng logging started - Log file: {log_file}")
        return file_handler

    def detach(self, handler):
        self.logger.removeHandler(handler)
        handler.close()

    def set_records_file(self, path, append=False):
        """
        Route key=value records to a file. Records carry no timestamps.

        Args:
            path (str or None): Records file, None disables records
            append (bool): Keep existing records (resumed runs)
        """
        self.records_path = path
        if path is not None:
            os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
            if not append:
                open(path, 'w', encoding='utf-8').close()

    def record(self, event, **fields):
        """
        Write one machine-parseable record line: event=<event> key=value ...

        Returns:
            str: The formatted record line
        """
        parts = [f"event={event}"]
        for key, value in fields.items():
            if isinstance(value, float):
                value = repr(value)
            parts.append(f"{key}={value}")
        line = ' '.join(parts)
        self.logger.info(line)
        if self.records_path is not None:
            with self._records_lock:
                with open(self.records_path, 'a', encoding='utf-8') as f:
                    f.write(line + '\n')
        return line

    def debug(self, message):
        """Log debug message"""
        self.logger.debug(message)

    def info(self, message):
        """Log info message"""
        self.logger.info(message)

    def warning(self, message):
        """Log warning message"""
        self.logger.warning(message)

    def error(self, message):
        """Log error message"""
        self.logger.error(message)

    def critical(self, message):
        """Log critical message"""
        self.logger.critical(message)


def parse_record(line):
    """Parse a record line produced by NmtRnngLogger.record into a dict"""
    fields = {}
    for part in line.strip().split(' '):
        if '=' not in part:
            raise ValueError(f"Not a key=value record field: {part!r}")
        key, value = part.split('=', 1)
        fields[key] = value
    return fields


# Global logger instance
logger = NmtRnngLogger()
