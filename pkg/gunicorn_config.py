"""
Gunicorn configuration for the EV Route Planner API
Production deployment
"""
import multiprocessing
import os

from evroute.config import RoutingConfig

# Server socket
bind = RoutingConfig.BIND

# Worker processes; each worker loads its own copy of the graph
workers = RoutingConfig.WORKERS or multiprocessing.cpu_count() * 2 + 1
worker_class = "sync"
worker_connections = 1000
timeout = 300  # oracle queries on large capacities are slow
keepalive = 5

# Logging
os.makedirs(RoutingConfig.LOG_DIR, exist_ok=True)
accesslog = os.path.join(RoutingConfig.LOG_DIR, "access.log")
errorlog = os.path.join(RoutingConfig.LOG_DIR, "error.log")
loglevel = RoutingConfig.LOG_LEVEL.lower()
access_log_format = '%(h)s %(l)s %(u)s %(t)s "%(r)s" %(s)s %(b)s "%(f)s" "%(a)s" %(D)s'

# Process naming
proc_name = "evroute"

# Server mechanics
daemon = False
pidfile = os.path.join(RoutingConfig.LOG_DIR, "gunicorn.pid")
umask = 0
user = None
group = None
tmp_upload_dir = None
