import os
import platform
import socket

import numpy as np
import psutil


class SystemInfo:
    """Host facts written into training logs so runs can be compared later"""

    def dump_system_info(self):
        """
        Return a dictionary with host information for the log header

        Returns:
            dict: System information
        """
        memory = psutil.virtual_memory()
        return {
            "hostname": socket.gethostname(),
            "platform": platform.platform(),
            "python": platform.python_version(),
            "numpy": np.__version__,
            "cpu_count": os.cpu_count(),
            "physical_cores": psutil.cpu_count(logical=False),
            "memory_total_mb": memory.total // (1024 * 1024),
        }

    def process_memory_mb(self):
        """
        Resident memory of the current process

        Returns:
            float: RSS in megabytes
        """
        return psutil.Process(os.getpid()).memory_info().rss / (1024 * 1024)
